#include "tmag/hysteresis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tmag {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Mass of a N(mean, sigma) cell between edges [e0, e1]. For very wide
// Gaussians the difference of CDFs stays accurate; no special casing needed.
double gauss_cell_mass(double e0, double e1, double mean, double sigma) {
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    return 0.5 * (std::erf((e1 - mean) * inv) - std::erf((e0 - mean) * inv));
}

} // namespace

void MemoryStack::validate(double h_sat, double h_now) const {
    if (origin_ != +1 && origin_ != -1)
        throw StateError("memory stack origin must be +1 or -1");
    const auto& e = extrema_;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!std::isfinite(e[i]) || std::abs(e[i]) >= h_sat)
            throw StateError("stored extremum " + std::to_string(e[i]) +
                             " A/m outside the open interval (-h_sat, h_sat)");
    }
    // First excursion leaves the major branch against the origin sweep:
    // origin -1 starts with a maximum, origin +1 with a minimum. Each later
    // extremum must lie strictly between the two before it (alternation and
    // strictly shrinking reach in one condition).
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double lo = std::min(e[i - 1], i >= 2 ? e[i - 2] : origin_ * h_sat);
        const double hi = std::max(e[i - 1], i >= 2 ? e[i - 2] : origin_ * h_sat);
        if (!(e[i] > lo && e[i] < hi))
            throw StateError("memory stack violates alternation/dominance at depth " +
                             std::to_string(i));
    }
    // h_now must sit on the segment started by the top extremum: strictly
    // inside the bound set by the pair below it (wiping would otherwise have
    // removed entries), on the correct side of the top.
    if (e.empty()) {
        if (origin_ > 0 ? (h_now <= -h_sat) : (h_now >= h_sat))
            throw StateError("field inconsistent with an empty history");
        return;
    }
    const int dir = segment_direction(h_now);
    if (h_now == e.back()) return; // sitting exactly on the last reversal
    const double far = e.size() >= 2 ? e[e.size() - 2] : dir * h_sat;
    if (dir > 0 ? !(h_now < far) : !(h_now > far))
        throw StateError("field has passed a stored extremum without wiping it");
    // Direction must continue the alternation.
    const int expected = (e.size() % 2 == 1) ? origin_ : -origin_;
    if (dir != expected)
        throw StateError("field moves against the branch implied by the history");
}

double HysteresisModel::evaluate(const MemoryStack& stack, double h) const {
    const double hs = h_sat();
    if (!std::isfinite(h) || std::abs(h) > h_clip())
        throw ValidationError("applied field " + std::to_string(h) +
                              " A/m exceeds the clip limit");
    stack.validate(hs, h);

    const double h_irr = clamp(h, -hs, hs);
    double b = stack.origin() * b_sat_irr();
    double prev = stack.origin() * hs;
    int dir = -stack.origin();
    for (std::size_t i = 0; i <= stack.depth(); ++i) {
        const double v = i < stack.depth() ? stack.extrema()[i] : h_irr;
        b += dir > 0 ? everett(v, prev) : -everett(prev, v);
        prev = v;
        dir = -dir;
    }
    return b + chi_rev() * h_irr;
}

double evaluate(const HysteresisModel& model, const MemoryStack& stack, double h) {
    return model.evaluate(stack, h);
}

double remanence(const HysteresisModel& model, const MemoryStack& stack, double h_from) {
    MagnetState probe(model, stack, h_from);
    probe.apply_field(0.0);
    return probe.b();
}

MagnetState::MagnetState(const HysteresisModel& model, MemoryStack stack, double h)
    : model_(&model), stack_(std::move(stack)), h_now_(h) {
    b_now_ = model_->evaluate(stack_, h_now_); // validates
}

MagnetState MagnetState::saturated(const HysteresisModel& model, int sign) {
    if (sign != +1 && sign != -1) throw ValidationError("saturation sign must be +1 or -1");
    return MagnetState(model, MemoryStack(sign), sign * model.h_sat());
}

void MagnetState::apply_field(double h_target) {
    const double hs = model_->h_sat();
    if (!std::isfinite(h_target) || std::abs(h_target) > model_->h_clip())
        throw ValidationError("field setpoint " + std::to_string(h_target) +
                              " A/m exceeds the clip limit");
    if (h_target == h_now_) return;

    if (std::abs(h_target) >= hs) {
        stack_.reset(h_target > 0 ? +1 : -1);
    } else {
        const int dir = h_target > h_now_ ? +1 : -1;
        if (dir != stack_.segment_direction(h_now_)) stack_.push(h_now_);
        stack_.wipe_toward(h_target, dir);
    }
    h_now_ = h_target;
    b_now_ = model_->evaluate(stack_, h_now_);
}

void GaussianShape::validate() const {
    if (!(b_r_max > 0) || !(b_sat > 0) || !(h_sat > 0))
        throw ValidationError("magnet amplitudes and h_sat must be positive");
    if (!(b_sat >= b_r_max))
        throw ValidationError("b_sat must be at least b_r_max");
    if (!(h_c > 0) || !(sigma_c > 0) || !(sigma_u > 0) || !(u_cut > 0))
        throw ValidationError("density shape parameters must be positive");
    if (grid_n < 11) throw ValidationError("magnet grid_n must be at least 11");
    if (h_clip_factor < 1.0) throw ValidationError("h_clip_factor must be >= 1");
    const double k_max = h_c + 8.0 * sigma_c;
    if (u_cut + k_max > h_sat)
        throw ValidationError("density support exceeds h_sat: u_cut + h_c + 8*sigma_c "
                              "must stay below the saturation field");
}

GaussianPreisachModel::GaussianPreisachModel(const GaussianShape& shape) : shape_(shape) {
    shape_.validate();
    const int n = shape_.grid_n;
    const double k_max = shape_.h_c + 8.0 * shape_.sigma_c;
    const double du = 2.0 * shape_.u_cut / n;
    const double dk = k_max / n;

    u_center_.resize(n);
    u_prefix_.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        u_center_[i] = -shape_.u_cut + (i + 0.5) * du;
        const double e0 = -shape_.u_cut + i * du;
        const double e1 = -shape_.u_cut + (i + 1) * du;
        u_prefix_[i + 1] = u_prefix_[i] + gauss_cell_mass(e0, e1, 0.0, shape_.sigma_u);
    }

    k_center_.resize(n);
    k_mass_.resize(n);
    double k_mass_max = 0.0;
    for (int j = 0; j < n; ++j) {
        k_center_[j] = (j + 0.5) * dk;
        k_mass_[j] = gauss_cell_mass(j * dk, (j + 1) * dk, shape_.h_c, shape_.sigma_c);
        k_mass_max = std::max(k_mass_max, k_mass_[j]);
    }
    j_lo_ = 0;
    j_hi_ = n - 1;
    while (j_lo_ < n && k_mass_[j_lo_] < 1e-18 * k_mass_max) ++j_lo_;
    while (j_hi_ >= 0 && k_mass_[j_hi_] < 1e-18 * k_mass_max) --j_hi_;
    if (j_lo_ > j_hi_) throw ValidationError("degenerate half-width density");

    // Raw (amp = 1) totals. remanence_raw is the relay sum after the history
    // [+h_sat, 0]: relays with beta >= 0 down, the rest up.
    double total = 0.0, rem = 0.0;
    for (int j = j_lo_; j <= j_hi_; ++j) {
        const double row = u_prefix_[u_center_.size()];
        total += k_mass_[j] * row;
        // down set: u - k >= 0  <=>  u >= k
        const int i_dn = first_center_ge(k_center_[j]);
        const double down = u_prefix_[u_center_.size()] - u_prefix_[i_dn];
        rem += k_mass_[j] * (row - 2.0 * down);
    }
    if (!(rem > 0))
        throw ValidationError("density yields non-positive saturation remanence");
    amp_ = shape_.b_r_max / rem;
    const double s_irr = amp_ * total;
    chi_ = (shape_.b_sat - s_irr) / shape_.h_sat;
    if (chi_ < 0)
        throw ValidationError("b_sat below the irreversible swing; raise b_sat or "
                              "lower b_r_max");
}

int GaussianPreisachModel::first_center_ge(double x) const {
    const int n = static_cast<int>(u_center_.size());
    const double du = 2.0 * shape_.u_cut / n;
    int i = static_cast<int>(std::ceil((x - u_center_[0]) / du));
    i = std::clamp(i, 0, n);
    while (i < n && u_center_[i] < x) ++i;
    while (i > 0 && u_center_[i - 1] >= x) --i;
    return i;
}

int GaussianPreisachModel::last_center_le(double x) const {
    const int n = static_cast<int>(u_center_.size());
    const double du = 2.0 * shape_.u_cut / n;
    int i = static_cast<int>(std::floor((x - u_center_[0]) / du));
    i = std::clamp(i, -1, n - 1);
    while (i + 1 < n && u_center_[i + 1] <= x) ++i;
    while (i >= 0 && u_center_[i] > x) --i;
    return i;
}

double GaussianPreisachModel::interval_mass(double u_lo, double u_hi) const {
    const int lo = first_center_ge(u_lo);
    const int hi = last_center_le(u_hi);
    if (hi < lo) return 0.0;
    return u_prefix_[hi + 1] - u_prefix_[lo];
}

double GaussianPreisachModel::everett(double alpha, double beta) const {
    const double hs = shape_.h_sat;
    alpha = clamp(alpha, -hs, hs);
    beta = clamp(beta, -hs, hs);
    if (alpha <= beta) return 0.0;
    double acc = 0.0;
    const double half_gap = 0.5 * (alpha - beta);
    for (int j = j_lo_; j <= j_hi_; ++j) {
        const double k = k_center_[j];
        if (k > half_gap) break; // rows sorted: nothing wider can fit
        acc += k_mass_[j] * interval_mass(beta + k, alpha - k);
    }
    return 2.0 * amp_ * acc;
}

} // namespace tmag
