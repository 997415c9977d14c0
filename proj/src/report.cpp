#include "hmnc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hmnc {

std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  std::string s(buf);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;  // inf / nan
  std::string mant = s.substr(0, e);
  const char sign = s[e + 1];
  std::string digits = s.substr(e + 2);
  while (digits.size() > 1 && digits[0] == '0') digits.erase(0, 1);
  return mant + "e" + sign + digits;
}

namespace {

std::string format_order(const std::optional<double>& o) {
  if (!o) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *o);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string emit_report(std::span<const ErrorRecord> records, ReportFormat format) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "inv_h,e0,ord0,e1,ord1,e2,ord2,e3,ord3\n";
    for (const auto& r : records) {
      os << r.inv_h;
      for (int k = 0; k < 4; ++k) os << ',' << format_sci(r.errors[k]) << ',' << format_order(r.orders[k]);
      os << '\n';
    }
    return os.str();
  }
  os << pad("1/h", 5) << " | " << pad("||u-u_h||_0", 11) << ' ' << pad("order", 5) << " | "
     << pad("|u-u_h|_1h", 11) << ' ' << pad("order", 5) << " | " << pad("|u-u_h|_2h", 11) << ' '
     << pad("order", 5) << " | " << pad("|u-u_h|_3h", 11) << ' ' << pad("order", 5) << '\n';
  os << std::string(89, '-') << '\n';
  for (const auto& r : records) {
    os << pad(std::to_string(r.inv_h), 5);
    for (int k = 0; k < 4; ++k) {
      const std::string o = r.orders[k] ? format_order(r.orders[k]) : "--";
      os << " | " << pad(format_sci(r.errors[k]), 11) << ' ' << pad(o, 5);
    }
    os << '\n';
  }
  return os.str();
}

std::string emit_unisolvency(std::span<const UnisolvencyReport> reports, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "n,variant,trial,cond,pass\n";
    for (const auto& rep : reports)
      for (const auto& t : rep.trials)
        os << rep.n << ',' << to_string(rep.variant) << ',' << t.trial << ',' << format_sci(t.condition) << ','
           << (t.pass ? 1 : 0) << '\n';
    return os.str();
  }
  for (const auto& rep : reports) {
    double worst = 0.0;
    std::size_t failed = 0;
    for (const auto& t : rep.trials) {
      worst = std::max(worst, t.condition);
      if (!t.pass) ++failed;
    }
    os << "n=" << rep.n << " element=" << to_string(rep.variant) << " dim(space)=" << rep.space_dimension
       << " #dofs=" << rep.dof_count << " trials=" << rep.trials.size() << " failed=" << failed
       << " max_cond=" << format_sci(worst) << " -> " << (rep.pass() ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

std::string emit_sweep(std::span<const SweepRecord> records, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    os << "epsilon,inv_h,e1,e3,energy\n";
    for (const auto& r : records)
      os << format_sci(r.epsilon) << ',' << r.inv_h << ',' << format_sci(r.e1) << ',' << format_sci(r.e3) << ','
         << format_sci(r.energy) << '\n';
    return os.str();
  }
  os << pad("epsilon", 10) << " | " << pad("1/h", 5) << " | " << pad("|u-u_h|_1h", 11) << " | "
     << pad("|u-u_h|_3h", 11) << " | " << pad("energy", 11) << '\n';
  os << std::string(60, '-') << '\n';
  for (const auto& r : records)
    os << pad(format_sci(r.epsilon), 10) << " | " << pad(std::to_string(r.inv_h), 5) << " | "
       << pad(format_sci(r.e1), 11) << " | " << pad(format_sci(r.e3), 11) << " | " << pad(format_sci(r.energy), 11)
       << '\n';
  return os.str();
}

}  // namespace hmnc
