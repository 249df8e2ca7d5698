#include "pmc/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pmc/errors.hpp"

namespace pmc::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("bad number in CSV: '" + s + "'");
  return x;
}

std::string bool_word(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
  os << "r,u\n";
  for (int i = 0; i <= profile.n(); ++i)
    os << format_double(profile.radius(i)) << ',' << format_double(profile[i]) << '\n';
}

RadialProfile read_profile_csv(std::istream& is) {
  const auto u = read_csv_column(is, "u");
  return RadialProfile(u);
}

void write_report_csv(std::ostream& os, const SolveReport& report) {
  std::vector<char> contact(report.lower.n() + 1, 0);
  for (const auto& iv : report.contact)
    for (int i = iv.first; i <= iv.last; ++i) contact[i] = 1;
  os << "r,u_lower,u_upper,contact\n";
  for (int i = 0; i <= report.lower.n(); ++i) {
    os << format_double(report.lower.radius(i)) << ',' << format_double(report.lower[i]) << ',';
    if (report.upper) os << format_double((*report.upper)[i]);
    os << ',' << static_cast<int>(contact[i]) << '\n';
  }
}

std::vector<double> read_csv_column(std::istream& is, const std::string& column) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty CSV");
  const auto header = split(line, ',');
  std::size_t idx = header.size();
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == column) idx = k;
  if (idx == header.size()) throw InvalidArgument("CSV has no column '" + column + "'");
  std::vector<double> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (idx >= fields.size()) throw InvalidArgument("short CSV row");
    out.push_back(parse_double(fields[idx]));
  }
  return out;
}

std::string report_sidecar(const StackProblem& problem, const SolveReport& report,
                           std::optional<double> grid_r_star, std::optional<double> oracle_r_star,
                           std::optional<std::uint64_t> seed) {
  nlohmann::ordered_json j;
  j["c"] = problem.c;
  j["eps"] = problem.eps;
  j["n"] = problem.n;
  j["mode"] = problem.mode == StackMode::SingleSheet      ? "single"
              : problem.mode == StackMode::SymmetricStack ? "stack"
                                                          : "membrane";
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["area"] = report.energy.area;
  j["volume"] = report.energy.volume;
  j["total"] = report.energy.total;
  j["iterations"] = report.iterations;
  j["kkt_residual"] = report.kkt_residual;
  j["converged"] = report.converged;
  auto contact = nlohmann::ordered_json::array();
  for (const auto& iv : report.contact) contact.push_back({iv.first, iv.last});
  j["contact"] = contact;
  j["r_star"] = grid_r_star ? nlohmann::ordered_json(*grid_r_star) : nlohmann::ordered_json(nullptr);
  j["r_star_oracle"] = oracle_r_star ? nlohmann::ordered_json(*oracle_r_star) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string constants_key_value(const ConstantsReport& r) {
  std::ostringstream os;
  const auto& in = r.local;
  os << "rho0=" << format_double(in.rho0) << '\n'
     << "mu=" << format_double(in.mu) << '\n'
     << "beta0=" << format_double(in.beta0) << '\n'
     << "delta=" << format_double(in.delta_msy) << '\n'
     << "c1=" << format_double(in.c1) << '\n'
     << "vol_M=" << format_double(in.vol_M) << '\n'
     << "theta=" << format_double(in.theta) << '\n'
     << "beta=" << format_double(in.beta) << '\n'
     << "v=" << format_double(r.mass_inputs.v) << '\n'
     << "kappa=" << format_double(r.mass_inputs.kappa) << '\n'
     << "c=" << format_double(r.mass_inputs.c) << '\n'
     << "delta1=" << format_double(r.delta1) << '\n'
     << "delta2=" << format_double(r.delta2) << '\n'
     << "eta=" << format_double(r.eta) << '\n'
     << "mass_upper=" << format_double(r.mass_upper) << '\n'
     << "mass_lower=" << format_double(r.mass_lower) << '\n'
     << "density_one_forced=" << bool_word(r.density_one_forced) << '\n';
  if (r.c_max) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *r.c_max);
    os << "c_max=" << buf << '\n';
  }
  if (r.no_threshold) os << "c_max=NoThreshold\n";
  return os.str();
}

std::string constants_csv_header() {
  return "v,kappa,c,delta1,delta2,eta,mass_upper,mass_lower,density_one_forced,c_max";
}

std::string constants_csv_row(const ConstantsReport& r) {
  std::ostringstream os;
  os << format_double(r.mass_inputs.v) << ',' << format_double(r.mass_inputs.kappa) << ','
     << format_double(r.mass_inputs.c) << ',' << format_double(r.delta1) << ','
     << format_double(r.delta2) << ',' << format_double(r.eta) << ',' << format_double(r.mass_upper)
     << ',' << format_double(r.mass_lower) << ',' << (r.density_one_forced ? 1 : 0) << ','
     << (r.c_max ? format_double(*r.c_max) : std::string());
  return os.str();
}

std::string regularity_key_value(const RegularityReport& r) {
  std::ostringstream os;
  os << "grid_n=" << r.grid_n << '\n'
     << "max_second_diff=" << format_double(r.max_second_diff) << '\n'
     << "max_third_diff=" << format_double(r.max_third_diff) << '\n';
  if (r.second_diff_jump_at_fb)
    os << "second_diff_jump_at_fb=" << format_double(*r.second_diff_jump_at_fb) << '\n';
  else
    os << "second_diff_jump_at_fb=NoFreeBoundary\n";
  return os.str();
}

std::string two_curve_svg(const RadialProfile& lower, const RadialProfile& upper,
                          const std::string& title) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 600.0;
  constexpr double kMargin = 60.0;
  auto sx = [&](double x) { return kMargin + (x + 1.0) * 0.5 * (kWidth - 2 * kMargin); };
  auto sy = [&](double z) { return kHeight - kMargin - (z + 1.0) * 0.5 * (kHeight - 2 * kMargin); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  auto polyline = [&](const RadialProfile& p, const char* colour) {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (int i = p.n(); i >= 0; --i) os << fmt(sx(-p.radius(i))) << ',' << fmt(sy(p[i])) << ' ';
    for (int i = 1; i <= p.n(); ++i) os << fmt(sx(p.radius(i))) << ',' << fmt(sy(p[i])) << ' ';
    os << "\"/>\n";
    return os.str();
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n"
     << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
     << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
     << title << "</text>\n"
     << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << fmt(sx(-1)) << "\" y1=\"" << fmt(sy(0)) << "\" x2=\"" << fmt(sx(1)) << "\" y2=\""
     << fmt(sy(0)) << "\"/>\n"
     << "<line x1=\"" << fmt(sx(0)) << "\" y1=\"" << fmt(sy(-1)) << "\" x2=\"" << fmt(sx(0)) << "\" y2=\""
     << fmt(sy(1)) << "\"/>\n"
     << "<rect x=\"" << fmt(sx(-1)) << "\" y=\"" << fmt(sy(1)) << "\" width=\"" << fmt(sx(1) - sx(-1))
     << "\" height=\"" << fmt(sy(-1) - sy(1)) << "\" fill=\"none\" stroke-dasharray=\"4 4\"/>\n"
     << "</g>\n"
     << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<text x=\"" << fmt(sx(1)) << "\" y=\"" << fmt(sy(0) + 16) << "\" text-anchor=\"end\">x</text>\n"
     << "<text x=\"" << fmt(sx(0) + 6) << "\" y=\"" << fmt(sy(1) - 6) << "\">z</text>\n"
     << "<text x=\"" << fmt(sx(-1)) << "\" y=\"" << fmt(sy(-1) + 16) << "\" text-anchor=\"middle\">-1</text>\n"
     << "<text x=\"" << fmt(sx(1)) << "\" y=\"" << fmt(sy(-1) + 16) << "\" text-anchor=\"middle\">1</text>\n"
     << "</g>\n"
     << polyline(lower, "#1f77b4") << polyline(upper, "#d62728") << "</svg>\n";
  return os.str();
}

}  // namespace pmc::io
