#pragma once

// Data-parallel kernels over batches of (gt, pred) quad pairs. Each element
// is independent; results are written to pre-sized slots, so output is
// bit-identical for any thread count. Serial counterparts for correctness
// checks live in epd/reference.hpp.

#include <vector>

#include "epd/geometry.hpp"
#include "epd/loss.hpp"

namespace epd::batch {

struct QuadPair {
    ExtremePoints gt;
    ExtremePoints pred;
};

std::vector<EiouBreakdown> eiou_batch(const std::vector<QuadPair>& pairs);

// Validates every gt box up front (serially), then evaluates in parallel.
std::vector<LossValue> loss_batch(const std::vector<QuadPair>& pairs);

// Validates all gradient preconditions up front (serially, throwing like the
// scalar op), then evaluates in parallel.
std::vector<LossGradient> grad_batch(const std::vector<QuadPair>& pairs);

// Thread-count control for the process; no-ops without OpenMP.
void set_threads(int n);
int max_threads();

}  // namespace epd::batch
