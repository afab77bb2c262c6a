#pragma once

#include <filesystem>
#include <vector>

#include "birot/fields.hpp"

namespace birot {

struct Plateau {
    double value;    // strictly positive, strictly decreasing across the list
    double measure;  // R^4 measure carried by this level, strictly positive
};

/// Discrete decreasing rearrangement f* of a weighted field: the step function
/// that takes plateaus[k].value on a t-interval of length plateaus[k].measure.
struct RearrangementProfile {
    std::vector<Plateau> plateaus;
    double total_measure() const;
};

/// Sort the |f| samples by decreasing value, attach each sample's orbit
/// measure, and merge equal values (equality after rounding to 12 significant
/// digits, which suppresses spurious micro-plateaus). Zero samples carry no
/// plateau.
RearrangementProfile rearrange(const ScalarField& f);

/// L^{p,q} norm evaluated exactly on the step function f*:
///   q < inf : ( sum_k v_k^q (p/q) (T_k^{q/p} - T_{k-1}^{q/p}) )^{1/q}
///   q = inf : max_k v_k T_k^{1/p}
/// with T_k the cumulative measures. Requires p > 1, q >= 1.
double lorentz_norm(const RearrangementProfile& prof, double p, double q);
double lorentz_norm(const ScalarField& f, double p, double q);

/// Profile I/O in the field snapshot style: "n 0 0 0 profile" header, then
/// value/measure pairs.
void write_profile(const std::filesystem::path& file, const RearrangementProfile& prof);
RearrangementProfile read_profile(const std::filesystem::path& file);

}  // namespace birot
