/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/regular_seq.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace cmeasure {

/* Function defined on the points admitting a witness of `domain`. */
struct AEFunction {
	RegularSeq domain;
	std::function<CReal(const DomainWitness &)> evaluator;
	std::string name = "f";

	CReal operator()(const DomainWitness &w) const { return evaluator(w); }
};

/*
 * Summable function: approximants f_n with integral |f_{n+1} - f_n| < 2^-n,
 * converging to the function on the witnesses of `agreement`.
 */
class Summable {
public:
	using Approx = std::function<Polygonal(std::size_t)>;
	/* Optional closed forms, used instead of building polygonals. */
	struct Hooks {
		std::function<Rational(std::size_t)> integral;  /* integral of f_n */
		std::function<Rational(std::size_t)> step_l1;   /* integral |f_{n+1} - f_n| */
	};

	Summable(AEFunction base, Approx approx, RegularSeq agreement, Hooks hooks = {});

	const AEFunction &base() const;
	const RegularSeq &agreement() const;
	/* Domain and agreement combined: a witness of it yields both. */
	const RegularSeq &witness_seq() const;
	/* Domain witness recovered from a witness of witness_seq(). */
	DomainWitness to_domain_witness(const DomainWitness &w) const;

	/* Memoized; the step bound into index n is checked on generation. */
	const Polygonal &approx(std::size_t n) const;
	Rational approx_integral(std::size_t n) const;
	Rational step_l1(std::size_t n) const;

	CReal operator()(const DomainWitness &w) const { return base().evaluator(w); }

private:
	struct Impl;
	std::shared_ptr<Impl> impl_;
};

struct MeasurableSet {
	Summable characteristic;
};

/* Integral of f_{p+2}; within 2^-p of the integral of F. */
Rational lebesgue_integral(const Summable &F, unsigned p);

struct IntegralReport {
	Rational value;
	std::size_t prefix_used;
	Rational tail_bound;
};
IntegralReport lebesgue_integral_report(const Summable &F, unsigned p);

bool integral_uniqueness_check(const Summable &F1, const Summable &F2, unsigned p);

struct PositivePoint {
	DomainWitness witness;      /* for F's domain */
	DomainWitness seq_witness;  /* for F.witness_seq() */
	Rational lower_bound;       /* F(xi) >= lower_bound > 0 */
	std::size_t index;          /* approximant index m used */
};

PositivePoint positive_point(const Summable &F, std::size_t N,
                             const RealizeOptions &opt = {});

/* Upper bounds on integral |F_{n+1} - F_n|, each checked against 2^-n. */
using PairBound = std::function<Rational(std::size_t)>;

/* Bound certified from approximants: l1(f_{n+1,k}, f_{n,k}) + 2^{-k+2}. */
PairBound approximant_pair_bound(std::function<Summable(std::size_t)> seq);

/*
 * Limit of summables F_n with integral |F_{n+1} - F_n| < 2^-n. The result
 * has the diagonal approximants f_{n+2,n+2}.
 */
Summable limit_of_summables(std::function<Summable(std::size_t)> seq,
                            PairBound pair_bound = nullptr);

/* PPS on which a nonnegative F with null integral vanishes. The null
 * integral and nonnegativity are checked up to `depth`, lazily beyond. */
RegularSeq ae_zero_of_null_integral(const Summable &F, unsigned depth = 8);

Rational measure(const MeasurableSet &X, unsigned p);
PositivePoint point_in_positive_set(const MeasurableSet &X, std::size_t N,
                                    const RealizeOptions &opt = {});
RegularSeq full_measure_to_pps(const MeasurableSet &X, unsigned depth = 8);

/* True if the approximant at precision 3 is within 1/8 of 0 or 1. */
bool is_binary_value(const CReal &v);

/* Set given by an exact finite interval union. */
MeasurableSet interval_set(const IntervalUnion &U);
/* Tents of height 1 at the given points, total integral below 2^-(n+1). */
RegularSeq point_exclusion_seq(std::vector<Rational> points, std::string name);
/* Lower bound on the distance from x to the excluded points, for a witness
 * of point_exclusion_seq with the given gamma. */
Rational exclusion_distance(std::size_t npoints, const Rational &gamma);

struct SetIntersection {
	MeasurableSet set;
	/* 1 - sum_{n<=K} d_n - tail(K) */
	std::function<Rational(std::size_t)> lower_bound;
};

/*
 * Intersection of sets X_n with mes X_n > 1 - d_n. `defect(n)` gives d_n and
 * `defect_tail(N)` an upper bound for sum_{n>N} d_n.
 */
SetIntersection countable_set_intersection(std::function<MeasurableSet(std::size_t)> sets,
                                           std::function<Rational(std::size_t)> defect,
                                           std::function<Rational(std::size_t)> defect_tail);

/* Value of a polygonal at a constructive point of [0,1]. */
CReal eval_at(const Polygonal &h, const CReal &x);

} // namespace cmeasure
