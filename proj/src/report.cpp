#include "causalbounds/report.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace cbounds {

std::string format_number(std::optional<double> v) {
  if (!v) return "NA";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *v);
  return std::string(buf.data(), ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (const char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_bounds_report(const std::vector<BoundsRow>& rows, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const auto& row : rows) {
    const auto& b = row.bounds;
    const std::size_t feasible = row.bootstrap ? row.bootstrap->feasible_count : (b.feasible() ? 1 : 0);
    std::optional<double> boot_lo, boot_hi;
    if (row.bootstrap) {
      boot_lo = row.bootstrap->boot_lower;
      boot_hi = row.bootstrap->boot_upper;
    }
    out << to_string(row.method) << ',' << csv_field(row.basis) << ',' << format_number(row.delta) << ','
        << format_number(row.lambda) << ',' << format_number(b.mu1.lo) << ',' << format_number(b.mu1.hi) << ','
        << format_number(b.mu0.lo) << ',' << format_number(b.mu0.hi) << ',' << format_number(b.psi_lo) << ','
        << format_number(b.psi_hi) << ',' << format_number(b.length()) << ',' << b.status() << ',' << feasible
        << ',' << format_number(boot_lo) << ',' << format_number(boot_hi) << '\n';
  }
}

}  // namespace cbounds
