#pragma once

#include <span>
#include <string>

#include "hmnc/element.hpp"
#include "hmnc/problems.hpp"

namespace hmnc {

enum class ReportFormat { Table, Csv };

/// Five significant digits with an unpadded exponent: 2.5856e+1, 4.1029e-5.
std::string format_sci(double v);

/// CSV columns inv_h,e0,ord0,e1,ord1,e2,ord2,e3,ord3 (orders blank on the
/// first row); the table mirrors the usual errors-and-orders layout.
/// Throws std::invalid_argument on an empty record list.
std::string emit_report(std::span<const ErrorRecord> records, ReportFormat format);

/// CSV columns n,variant,trial,cond,pass; the table adds one summary line per report.
std::string emit_unisolvency(std::span<const UnisolvencyReport> reports, ReportFormat format);

/// CSV columns epsilon,inv_h,e1,e3,energy.
std::string emit_sweep(std::span<const SweepRecord> records, ReportFormat format);

}  // namespace hmnc
