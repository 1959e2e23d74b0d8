#pragma once

#include <optional>

#include "spsolve/oracle.hpp"

namespace spsolve {

/// One ledger snapshot per restart (sliding) or per iteration (baselines).
/// Counts are cumulative, so they never decrease across one run's records.
struct TraceRecord {
  int phase = 0;
  double r2 = 0.0;
  std::optional<double> psi;
  std::optional<double> gap;
  long long grad_f = 0;
  long long grad_g = 0;
  long long matvec_B = 0;
  long long matvec_Bt = 0;
  double exec_time = 0.0;
};

inline void stamp_counts(TraceRecord& rec, const OracleLedger& ledger, const CostModel& cost) {
  rec.grad_f = ledger.grad_f;
  rec.grad_g = ledger.grad_g;
  rec.matvec_B = ledger.matvec_B;
  rec.matvec_Bt = ledger.matvec_Bt;
  rec.exec_time = execution_time(ledger, cost);
}

}  // namespace spsolve
