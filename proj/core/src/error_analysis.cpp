#include "cascade_clock/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/errors.hpp"
#include "cascade_clock/measurement.hpp"
#include "cascade_clock/parallel.hpp"

namespace cascade_clock {

const char* to_string(MeasurementKind kind) {
    return kind == MeasurementKind::ramsey ? "ramsey" : "gaussian";
}

MeasurementKind parse_measurement_kind(const std::string& text) {
    if (text == "ramsey") return MeasurementKind::ramsey;
    if (text == "gaussian") return MeasurementKind::gaussian;
    throw ValidationError("unknown model '" + text + "' (expected ramsey or gaussian)");
}

const char* to_string(TieRule rule) {
    switch (rule) {
        case TieRule::closed:
            return "closed";
        case TieRule::strict:
            return "strict";
        case TieRule::half:
            return "half";
    }
    return "unknown";
}

TieRule parse_tie_rule(const std::string& text) {
    if (text == "closed") return TieRule::closed;
    if (text == "strict") return TieRule::strict;
    if (text == "half") return TieRule::half;
    throw ValidationError("unknown tie rule '" + text + "' (expected closed, strict or half)");
}

TieRule default_tie_rule(Scheme scheme) {
    return scheme == Scheme::reduced_frequency ? TieRule::strict : TieRule::half;
}

void SchemeSpec::validate() const {
    if (!(ratio > 1.0) || !std::isfinite(ratio)) throw ValidationError("division ratio D must exceed 1");
    if (scheme == Scheme::reduced_period && ratio != std::floor(ratio)) {
        throw ValidationError("reduced-period schemes need an integer ratio");
    }
    if (model == MeasurementKind::gaussian) {
        if (!gaussian_width) throw ValidationError("gaussian model needs a width");
        if (!(*gaussian_width > 0.0)) throw ValidationError("gaussian width must be positive");
    } else if (gaussian_width) {
        throw ValidationError("ramsey model takes no gaussian width");
    }
}

bool SchemeSpec::accepts_atoms(int atoms) const {
    if (model == MeasurementKind::ramsey) return atoms >= 2 && atoms % 2 == 0;
    return atoms >= 1;
}

int SchemeSpec::smallest_atoms() const { return model == MeasurementKind::ramsey ? 2 : 1; }

int SchemeSpec::atoms_step() const { return model == MeasurementKind::ramsey ? 2 : 1; }

std::string SchemeSpec::label() const { return std::string(to_string(scheme)) + "/" + to_string(model); }

double StepErrorBreakdown::total(TieRule rule) const {
    switch (rule) {
        case TieRule::closed:
            return beyond + tie_plus + tie_minus;
        case TieRule::strict:
            return beyond;
        case TieRule::half:
            return beyond + 0.5 * (tie_plus + tie_minus);
    }
    return beyond;
}

namespace {

// Outcomes lighter than this are dropped before pairing; the discarded mass is
// bounded by (outcome count) * floor, far below any reported probability.
constexpr double kAtomFloor = 1e-20;
constexpr double kPairFloor = 1e-24;
// Discrepancies within this distance of +-pi are classified as ties.
constexpr double kTieTolerance = 1e-9;

struct Atom {
    double g;
    double p;
};

/// Distribution of the wrapped estimator error G = wrap(phi - beta).
class ErrorModel {
  public:
    ErrorModel(int atoms, const SchemeSpec& spec) : atoms_(atoms), model_(spec.model) {
        if (!spec.accepts_atoms(atoms)) {
            throw ValidationError("atom count " + std::to_string(atoms) + " invalid for " + spec.label());
        }
        if (model_ == MeasurementKind::gaussian) {
            amplitudes_ = gaussian_amplitudes({atoms, *spec.gaussian_width});
        }
    }

    std::vector<Atom> atoms_at(double phi) const {
        OutcomeDistribution dist = model_ == MeasurementKind::ramsey
                                       ? ramsey_outcome_distribution({atoms_}, phi)
                                       : phase_state_distribution(amplitudes_, phi);
        std::vector<Atom> out;
        out.reserve(dist.outcomes.size());
        for (const auto& o : dist.outcomes) {
            if (o.probability >= kAtomFloor) out.push_back({wrap_phase(phi - o.estimate), o.probability});
        }
        return out;
    }

  private:
    int atoms_;
    MeasurementKind model_;
    std::vector<double> amplitudes_;
};

/// Sorted G values of the coarse level with prefix and suffix mass.
class SortedLevel {
  public:
    explicit SortedLevel(std::vector<Atom> atoms) {
        std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.g < b.g; });
        g_.reserve(atoms.size());
        prefix_.assign(atoms.size() + 1, 0.0);
        suffix_.assign(atoms.size() + 1, 0.0);
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            g_.push_back(atoms[i].g);
            prefix_[i + 1] = prefix_[i] + atoms[i].p;
        }
        for (std::size_t i = atoms.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + atoms[i].p;
    }

    double min_g() const { return g_.empty() ? 0.0 : g_.front(); }
    double max_g() const { return g_.empty() ? 0.0 : g_.back(); }

    /// Adds weight * atom.p * P(d relation) for d = offset + scale * atom.g - G,
    /// over a run of atoms sorted by g. The boundaries move monotonically with
    /// d, so they are swept with cursors.
    template <typename It>
    void accumulate_run(It first, It last, double offset, double scale, double weight,
                        StepErrorBreakdown& out) const {
        if (first == last || g_.empty()) return;
        double v = offset + scale * first->g;
        std::size_t lo1 = lower(v - kPi - kTieTolerance);
        std::size_t hi1 = upper(v - kPi + kTieTolerance);
        std::size_t lo2 = lower(v + kPi - kTieTolerance);
        std::size_t hi2 = upper(v + kPi + kTieTolerance);
        const std::size_t n = g_.size();
        for (It it = first; it != last; ++it) {
            const double p = weight * it->p;
            if (p < kPairFloor) continue;
            v = offset + scale * it->g;
            while (lo1 < n && g_[lo1] < v - kPi - kTieTolerance) ++lo1;
            while (hi1 < n && g_[hi1] <= v - kPi + kTieTolerance) ++hi1;
            while (lo2 < n && g_[lo2] < v + kPi - kTieTolerance) ++lo2;
            while (hi2 < n && g_[hi2] <= v + kPi + kTieTolerance) ++hi2;
            out.beyond += p * (prefix_[lo1] + suffix_[hi2]);
            if (hi1 > lo1) out.tie_plus += p * (prefix_[hi1] - prefix_[lo1]);
            if (hi2 > lo2) out.tie_minus += p * (prefix_[hi2] - prefix_[lo2]);
        }
    }

  private:
    std::size_t lower(double x) const {
        return static_cast<std::size_t>(std::lower_bound(g_.begin(), g_.end(), x) - g_.begin());
    }
    std::size_t upper(double x) const {
        return static_cast<std::size_t>(std::upper_bound(g_.begin(), g_.end(), x) - g_.begin());
    }

    std::vector<double> g_;
    std::vector<double> prefix_;
    std::vector<double> suffix_;
};

double midpoint(int index, int points, double span_start, double span) {
    return span_start + (index + 0.5) * span / points;
}

StepErrorBreakdown add(StepErrorBreakdown a, const StepErrorBreakdown& b, double scale) {
    a.beyond += scale * b.beyond;
    a.tie_plus += scale * b.tie_plus;
    a.tie_minus += scale * b.tie_minus;
    return a;
}

StepErrorBreakdown reduced_frequency_breakdown(const ErrorModel& model, double ratio, int grid) {
    std::vector<StepErrorBreakdown> per_point(static_cast<std::size_t>(grid));
    parallel_for(per_point.size(), [&](std::size_t i) {
        double phi = midpoint(static_cast<int>(i), grid, -kPi, kTwoPi);
        auto fine = model.atoms_at(phi);
        std::sort(fine.begin(), fine.end(), [](const Atom& a, const Atom& b) { return a.g < b.g; });
        SortedLevel coarse(model.atoms_at(wrap_phase(ratio * phi)));
        StepErrorBreakdown acc;
        coarse.accumulate_run(fine.begin(), fine.end(), 0.0, ratio, 1.0, acc);
        per_point[i] = acc;
    });
    StepErrorBreakdown total;
    for (const auto& b : per_point) total = add(total, b, 1.0 / grid);
    return total;
}

/// Nondecreasing index tuples with their multiplicity among all orderings.
struct SubPhaseTuple {
    std::vector<int> indices;
    double multiplicity;
};

std::vector<SubPhaseTuple> sub_phase_tuples(int length, int points) {
    std::vector<SubPhaseTuple> tuples;
    std::vector<int> current(static_cast<std::size_t>(length), 0);
    const double length_factorial = std::tgamma(length + 1.0);
    while (true) {
        double denom = 1.0;
        for (std::size_t i = 0; i < current.size();) {
            std::size_t j = i;
            while (j < current.size() && current[j] == current[i]) ++j;
            denom *= std::tgamma(static_cast<double>(j - i) + 1.0);
            i = j;
        }
        tuples.push_back({current, length_factorial / denom});
        // Advance to the next nondecreasing tuple.
        int pos = length - 1;
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == points - 1) --pos;
        if (pos < 0) break;
        int value = current[static_cast<std::size_t>(pos)] + 1;
        for (auto k = static_cast<std::size_t>(pos); k < current.size(); ++k) current[k] = value;
    }
    return tuples;
}

StepErrorBreakdown reduced_period_breakdown(const ErrorModel& model, int ratio, int grid) {
    const int points = std::max(8, grid / 4);
    std::vector<std::vector<Atom>> sub_atoms(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        sub_atoms[static_cast<std::size_t>(i)] = model.atoms_at(midpoint(i, points, -kPi, kTwoPi));
    }
    // The coarse phase is the sum of sub-phases; it depends only on the index sum.
    const int sums = ratio * (points - 1) + 1;
    std::vector<SortedLevel> coarse;
    coarse.reserve(static_cast<std::size_t>(sums));
    for (int s = 0; s < sums; ++s) {
        double phase = -ratio * kPi + (s + 0.5 * ratio) * kTwoPi / points;
        coarse.emplace_back(model.atoms_at(wrap_phase(phase)));
    }
    // Sorting each sub-phase's atoms lets the innermost factor skip the pairs
    // whose sum cannot reach the +-pi boundary of the coarse level.
    for (auto& atoms : sub_atoms) {
        std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.g < b.g; });
    }
    const auto tuples = sub_phase_tuples(ratio, points);
    std::vector<StepErrorBreakdown> per_tuple(tuples.size());
    parallel_for(tuples.size(), [&](std::size_t t) {
        const auto& idx = tuples[t].indices;
        std::vector<Atom> partial = sub_atoms[static_cast<std::size_t>(idx[0])];
        for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
            const auto& next = sub_atoms[static_cast<std::size_t>(idx[k])];
            std::vector<Atom> combined;
            combined.reserve(partial.size() * next.size());
            for (const Atom& a : partial) {
                for (const Atom& b : next) {
                    double p = a.p * b.p;
                    if (p >= kPairFloor) combined.push_back({a.g + b.g, p});
                }
            }
            partial = std::move(combined);
        }
        const int index_sum = std::accumulate(idx.begin(), idx.end(), 0);
        const SortedLevel& level = coarse[static_cast<std::size_t>(index_sum)];
        const auto& last = sub_atoms[static_cast<std::size_t>(idx.back())];
        auto atom_below = [](const Atom& atom, double value) { return atom.g < value; };
        auto value_below = [](double value, const Atom& atom) { return value < atom.g; };
        StepErrorBreakdown acc;
        for (const Atom& a : partial) {
            // v = a.g + b.g contributes only if v + pi - tol <= max G or v - pi + tol >= min G.
            double low_cut = level.max_g() - kPi + kTieTolerance - a.g;
            double high_cut = level.min_g() + kPi - kTieTolerance - a.g;
            auto low_end = std::upper_bound(last.begin(), last.end(), low_cut, value_below);
            auto high_begin = std::lower_bound(last.begin(), last.end(), high_cut, atom_below);
            if (high_begin < low_end) high_begin = low_end;
            level.accumulate_run(last.begin(), low_end, a.g, 1.0, a.p, acc);
            level.accumulate_run(high_begin, last.end(), a.g, 1.0, a.p, acc);
        }
        per_tuple[t] = acc;
    });

    const double cells = std::pow(static_cast<double>(points), ratio);
    StepErrorBreakdown total;
    for (std::size_t t = 0; t < tuples.size(); ++t) total = add(total, per_tuple[t], tuples[t].multiplicity / cells);
    return total;
}

}  // namespace

StepErrorBreakdown step_error_breakdown(int atoms, const SchemeSpec& spec, int phase_grid) {
    spec.validate();
    if (phase_grid < 64) throw ValidationError("phase grid needs at least 64 points");
    ErrorModel model(atoms, spec);
    if (spec.scheme == Scheme::reduced_frequency) return reduced_frequency_breakdown(model, spec.ratio, phase_grid);
    return reduced_period_breakdown(model, static_cast<int>(spec.ratio), phase_grid);
}

double step_error_probability(int atoms, const SchemeSpec& spec, int phase_grid) {
    double p = step_error_breakdown(atoms, spec, phase_grid).total(spec.effective_tie_rule());
    return std::clamp(p, 0.0, 1.0);
}

int min_ensemble_size(double target_p, const SchemeSpec& spec, int phase_grid, int max_atoms) {
    if (!(target_p > 0.0) || target_p > 1.0) throw ValidationError("target probability must lie in (0, 1]");
    spec.validate();
    for (int n = spec.smallest_atoms(); n <= max_atoms; n += spec.atoms_step()) {
        if (step_error_probability(n, spec, phase_grid) <= target_p) return n;
    }
    throw SearchBoundExceeded("no ensemble of at most " + std::to_string(max_atoms) + " atoms reaches p <= " +
                              std::to_string(target_p) + " for " + spec.label());
}

WidthOptimum optimize_gaussian_width(int atoms, const SchemeSpec& spec, int phase_grid, double lower, double upper,
                                     double tolerance) {
    if (spec.model != MeasurementKind::gaussian) throw ValidationError("width optimization needs the gaussian model");
    if (!(lower > 0.0) || !(upper > lower) || !(tolerance > 0.0)) throw ValidationError("invalid width bracket");
    auto objective = [&](double width) {
        SchemeSpec trial = spec;
        trial.gaussian_width = width;
        return step_error_probability(atoms, trial, phase_grid);
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lower;
    double b = upper;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > tolerance) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return fc <= fd ? WidthOptimum{c, fc} : WidthOptimum{d, fd};
}

MinimumEnsemble min_ensemble_size_optimized(double target_p, const SchemeSpec& spec, int phase_grid, int max_atoms) {
    if (spec.model == MeasurementKind::ramsey) {
        int n = min_ensemble_size(target_p, spec, phase_grid, max_atoms);
        return {n, step_error_probability(n, spec, phase_grid), std::nullopt};
    }
    if (!(target_p > 0.0) || target_p > 1.0) throw ValidationError("target probability must lie in (0, 1]");
    SchemeSpec probe = spec;
    if (!probe.gaussian_width) probe.gaussian_width = 1.0;
    probe.validate();
    for (int n = probe.smallest_atoms(); n <= max_atoms; n += probe.atoms_step()) {
        WidthOptimum best = optimize_gaussian_width(n, probe, phase_grid);
        if (best.probability <= target_p) return {n, best.probability, best.width};
    }
    throw SearchBoundExceeded("no gaussian ensemble of at most " + std::to_string(max_atoms) +
                              " atoms reaches the target for " + spec.label());
}

std::vector<ErrorCurvePoint> error_curve(const SchemeSpec& spec, std::span<const int> atoms, int phase_grid) {
    std::vector<ErrorCurvePoint> curve;
    curve.reserve(atoms.size());
    for (int n : atoms) curve.push_back({n, step_error_probability(n, spec, phase_grid)});
    return curve;
}

double ExponentialFit::evaluate(double atoms) const { return prefactor * std::exp(-rate * atoms); }

ExponentialFit fit_exponential(std::span<const ErrorCurvePoint> points) {
    if (points.size() < 3) throw ValidationError("exponential fit needs at least 3 points");
    const auto count = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& pt : points) {
        if (!(pt.probability > 0.0)) {
            throw NonpositiveProbabilityError("cannot fit nonpositive probability at N=" + std::to_string(pt.atoms));
        }
        mean_x += pt.atoms;
        mean_y += std::log(pt.probability);
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& pt : points) {
        double dx = pt.atoms - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(pt.probability) - mean_y);
    }
    if (sxx == 0.0) throw ValidationError("exponential fit needs at least two distinct atom counts");
    const double slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_x;
    double ss = 0.0;
    for (const auto& pt : points) {
        double r = std::log(pt.probability) - (intercept + slope * pt.atoms);
        ss += r * r;
    }
    return {std::exp(intercept), -slope, std::sqrt(ss / count)};
}

double total_error_probability(double step_p, int ensembles, const SchemeSpec& spec) {
    if (ensembles < 1) throw ValidationError("cascade needs at least one ensemble");
    if (spec.scheme == Scheme::reduced_frequency) return (ensembles - 1) * step_p;
    // (D^(M-1) - 1) / (D - 1) combination steps per base period.
    double steps = 0.0;
    double power = 1.0;
    for (int j = 0; j < ensembles - 1; ++j) {
        steps += power;
        power *= spec.ratio;
    }
    return steps * step_p;
}

}  // namespace cascade_clock
