#pragma once

#include <cstddef>
#include <vector>

#include "tmag/errors.hpp"

namespace tmag {

// Reversal-point memory of a scalar rate-independent hysteresis operator.
//
// `origin` is the sign of the saturation the stored history hangs from: +1
// means the magnet last saturated positive and the outermost branch is the
// descending major branch, -1 the mirror case. `extrema` holds past field
// reversal points, dominant first, alternating between maxima and minima
// (origin -1 starts with a maximum, origin +1 with a minimum). An empty
// stack means the magnet sits on the major loop with no minor-loop history.
class MemoryStack {
public:
    MemoryStack() = default;
    explicit MemoryStack(int origin) : origin_(origin) {}
    MemoryStack(int origin, std::vector<double> extrema)
        : origin_(origin), extrema_(std::move(extrema)) {}

    int origin() const { return origin_; }
    const std::vector<double>& extrema() const { return extrema_; }
    bool empty() const { return extrema_.empty(); }
    std::size_t depth() const { return extrema_.size(); }
    double top() const { return extrema_.back(); }

    void reset(int origin) {
        origin_ = origin;
        extrema_.clear();
    }

    void push(double h) { extrema_.push_back(h); }

    // Removes closed loops whose far extremum is reached or passed by a
    // monotone sweep to `h` (direction `dir`). Equality wipes: re-reaching a
    // stored extremum closes its loop exactly.
    void wipe_toward(double h, int dir) {
        while (extrema_.size() >= 2) {
            const double far = extrema_[extrema_.size() - 2];
            if ((dir > 0 && far <= h) || (dir < 0 && far >= h))
                extrema_.resize(extrema_.size() - 2);
            else
                break;
        }
    }

    // Direction of the branch segment currently being traversed when the
    // field sits at `h_now`.
    int segment_direction(double h_now) const {
        if (extrema_.empty()) return -origin_;
        return h_now > extrema_.back() ? +1 : -1;
    }

    // Throws StateError when alternation or dominance is violated, or when
    // `h_now` does not lie on the segment implied by the stored history.
    void validate(double h_sat, double h_now) const;

    bool operator==(const MemoryStack& o) const {
        return origin_ == o.origin_ && extrema_ == o.extrema_;
    }

private:
    int origin_ = +1;
    std::vector<double> extrema_;
};

// Everett-surface representation of a scalar hysteresis operator.
//
// everett(a, b) is the flux-density change accumulated by a monotone sweep
// of the applied field from b up to a, starting from a state where the swept
// relays are all switched down. Together with a linear reversible term it
// fully determines B for any reversal history via the telescoping sum in
// evaluate().
class HysteresisModel {
public:
    virtual ~HysteresisModel() = default;

    virtual double everett(double alpha, double beta) const = 0;
    virtual double h_sat() const = 0;   // A/m, history wipe threshold
    virtual double b_sat() const = 0;   // T, flux density at +h_sat
    virtual double chi_rev() const = 0; // T/(A/m), reversible susceptibility
    virtual double h_clip() const = 0;  // A/m, hard input limit

    // Perturbed surfaces used as mismatched plants may violate the monotone
    // bounds; they report false here and skip the strict |b| <= b_sat check.
    virtual bool strict_bounds() const { return true; }

    // Irreversible half-swing: E(h_sat, -h_sat) / 2.
    double b_sat_irr() const { return 0.5 * everett(h_sat(), -h_sat()); }

    // Remanence reached from positive saturation (the largest tunable MS).
    double remanence_sat() const {
        return b_sat_irr() - everett(h_sat(), 0.0);
    }

    // B for a validated (stack, h) pair. Rate independent: depends on the
    // stored extrema and h only.
    double evaluate(const MemoryStack& stack, double h) const;
};

double evaluate(const HysteresisModel& model, const MemoryStack& stack, double h);

// Remanence after the monotone excursion h_from -> 0 with wiping applied;
// pure query, nothing is mutated.
double remanence(const HysteresisModel& model, const MemoryStack& stack, double h_from);

// Full state of one soft magnet: applied field, flux density and reversal
// history, tied to the model that owns it. b is kept consistent with
// model->evaluate(stack, h) at all times.
class MagnetState {
public:
    MagnetState(const HysteresisModel& model, MemoryStack stack, double h);

    static MagnetState saturated(const HysteresisModel& model, int sign);

    // Monotone sweep to h_target: wipes dominated extrema, records a new
    // reversal when the direction changes, clears the history entirely when
    // |h_target| >= h_sat.
    void apply_field(double h_target);

    double h() const { return h_now_; }
    double b() const { return b_now_; }
    const MemoryStack& stack() const { return stack_; }
    const HysteresisModel& model() const { return *model_; }

    // Remanence this state would decay to if the field were set to zero now.
    double remanence_now() const { return remanence(*model_, stack_, h_now_); }

private:
    const HysteresisModel* model_;
    MemoryStack stack_;
    double h_now_;
    double b_now_;
};

// Parameters of the built-in analytic model. The Preisach density is a
// product of a Gaussian in the interaction field u = (alpha+beta)/2,
// restricted to |u| <= u_cut, and a Gaussian in the relay half-width
// k = (alpha-beta)/2 > 0. The density is realized as a separable discrete
// measure on a grid_n x grid_n cell lattice in (u, k); its amplitude is
// normalized so the remanence from positive saturation equals b_r_max, and
// the reversible susceptibility is set so B(+h_sat) equals b_sat.
struct GaussianShape {
    double b_r_max = 1.5;       // T
    double b_sat = 1.65;        // T
    double h_sat = 500e3;       // A/m
    double h_c = 160e3;         // A/m, mean half-width (coercive field)
    double sigma_c = 8e3;       // A/m, half-width spread
    double sigma_u = 2e6;       // A/m, interaction-field spread
    double u_cut = 120e3;       // A/m, interaction-field support half-width
    double h_clip_factor = 10.0;
    int grid_n = 2001;

    double h_clip() const { return h_clip_factor * h_sat; }
    void validate() const;
};

class GaussianPreisachModel final : public HysteresisModel {
public:
    explicit GaussianPreisachModel(const GaussianShape& shape = {});

    double everett(double alpha, double beta) const override;
    double h_sat() const override { return shape_.h_sat; }
    double b_sat() const override { return shape_.b_sat; }
    double chi_rev() const override { return chi_; }
    double h_clip() const override { return shape_.h_clip(); }

    const GaussianShape& shape() const { return shape_; }
    double amplitude() const { return amp_; }

private:
    GaussianShape shape_;
    std::vector<double> u_center_;  // cell centers, ascending
    std::vector<double> u_prefix_;  // prefix sums of cell masses, size n+1
    std::vector<double> k_center_;
    std::vector<double> k_mass_;
    int j_lo_ = 0, j_hi_ = -1;      // rows with non-negligible mass
    double amp_ = 0.0;              // T per unit raw mass
    double chi_ = 0.0;

    double interval_mass(double u_lo, double u_hi) const;
    int first_center_ge(double x) const;
    int last_center_le(double x) const;
};

} // namespace tmag
