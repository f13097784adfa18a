#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalbounds/analysis.hpp"
#include "causalbounds/bootstrap.hpp"
#include "causalbounds/bounds.hpp"

namespace cbounds {

/// Shortest decimal text that reads back to the same double; "NA" if absent.
std::string format_number(std::optional<double> v);

/// Quotes the field when it holds a comma, quote or newline.
std::string csv_field(const std::string& text);

struct BoundsRow {
  Method method = Method::Proposed;
  std::string basis;
  double delta = 0.01;
  std::optional<double> lambda;
  BoundResult bounds;
  std::optional<BootstrapSummary> bootstrap;
};

inline constexpr const char* kReportHeader =
    "method,basis,delta,lambda,mu1_lo,mu1_hi,mu0_lo,mu0_hi,psi_lo,psi_hi,length,status,feasible_count,"
    "boot_lower,boot_upper";

/// One line per row under kReportHeader. feasible_count is the bootstrap
/// count when a bootstrap ran, else 1 or 0 for the point analysis.
void write_bounds_report(const std::vector<BoundsRow>& rows, std::ostream& out);

}  // namespace cbounds
