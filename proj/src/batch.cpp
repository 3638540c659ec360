#include "epd/batch.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epd::batch {

std::vector<EiouBreakdown> eiou_batch(const std::vector<QuadPair>& pairs) {
    std::vector<EiouBreakdown> out(pairs.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        out[i] = eiou(pairs[i].gt, pairs[i].pred);
    }
    return out;
}

std::vector<LossValue> loss_batch(const std::vector<QuadPair>& pairs) {
    // Throwing inside an OpenMP region is undefined; surface precondition
    // failures before going parallel.
    for (const QuadPair& p : pairs) {
        if (enclosing_box(p.gt).area() <= 0.0) {
            throw std::invalid_argument("eiou_loss: gt enclosing box has zero area");
        }
    }
    std::vector<LossValue> out(pairs.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        out[i] = eiou_loss(pairs[i].gt, pairs[i].pred);
    }
    return out;
}

std::vector<LossGradient> grad_batch(const std::vector<QuadPair>& pairs) {
    for (const QuadPair& p : pairs) {
        check_grad_preconditions(p.gt, p.pred);
    }
    std::vector<LossGradient> out(pairs.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        out[i] = eiou_loss_grad(pairs[i].gt, pairs[i].pred);
    }
    return out;
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace epd::batch
