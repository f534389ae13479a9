#pragma once

namespace bbmh {

/// Member (delta1, delta2, delta3) of the admissible splitting family of the
/// hyperbolized BBM system, together with the relaxation parameter eps.
/// The default is the splitting used throughout the experiments:
/// delta1 = delta2 = 0, delta3 = 1.
struct SplittingParams {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 1.0;
    double eps = 1.0;

    bool operator==(const SplittingParams&) const = default;
};

}  // namespace bbmh
