/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/creal.hpp>
#include <cmeasure/polygonal.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cmeasure {

/*
 * Lazily generated sequence of nonnegative polygonals h_n with
 * integral(h_n) < scale * 2^-n, scale <= 1. Each term is checked exactly
 * when first generated and memoized afterwards.
 */
class RegularSeq {
public:
	using Generator = std::function<Polygonal(std::size_t)>;

	/* The zero sequence. */
	RegularSeq();
	explicit RegularSeq(Generator gen, Rational scale = Rational(1), std::string name = "seq");

	const Polygonal &term(std::size_t n) const;
	Rational bound(std::size_t n) const;
	/* Sum of bound(n) over n > K. */
	Rational tail(std::size_t K) const;
	const Rational &scale() const;
	const std::string &name() const;
	bool is_zero() const;
	bool same_as(const RegularSeq &o) const { return impl_ == o.impl_; }

	/* Re-checks nonnegativity and the integral bound for n <= N. */
	void check_prefix(std::size_t N) const;

private:
	struct Impl;
	std::shared_ptr<Impl> impl_;
};

/* (x, gamma) with sum_{n<=m} h_n(x) <= gamma for all m. */
struct DomainWitness {
	CReal x;
	Rational gamma;
};

struct WitnessCheck {
	bool ok = true;
	Rational prefix_sum;   /* sum_{n<=M} h_n at the rational approximant */
	Rational error;        /* accumulated Lipschitz error of that sum */
};

/* Evaluates the prefix sums at rat_approx(x, p) and accounts for the
 * approximation error; ok is false only when the witness is refuted. */
WitnessCheck verify_witness(const RegularSeq &seq, const DomainWitness &w,
                            std::size_t M, unsigned p);

/*
 * Reweighted view of a regular sequence used by point realization:
 * term n is weight0 * ratio^n * base.term(offset + n), so its integral is
 * below c * r^n with c = weight0 * scale * 2^-offset and r = ratio / 2.
 */
struct SeqView {
	RegularSeq base;
	std::size_t offset = 0;
	Rational weight0{1};
	Rational ratio{1};

	SeqView() = default;
	SeqView(RegularSeq b) : base(std::move(b)) {}
	SeqView(RegularSeq b, std::size_t off, Rational w0, Rational r)
	: base(std::move(b)), offset(off), weight0(std::move(w0)), ratio(std::move(r)) {}

	Rational weight(std::size_t n) const;
	Rational c() const;
	Rational r() const { return ratio / 2; }
};

struct RealizeOptions {
	unsigned first_eps_exp = 1;    /* first epsilon tried is 2^-first_eps_exp */
	std::size_t prefix_step = 2;   /* prefix extension per halving */
	Rational lo{0}, hi{1};         /* bisection starts on [lo, hi] */
};

struct Realization {
	CReal xi;
	Rational margin;      /* h(xi) - margin >= sum_n (1+margin)^n view_n(xi) */
	Rational sum_bound;   /* max(h) - margin, a rational bound on the series */
	std::size_t prefix;   /* prefix length at which the margin was certified */
	Rational lo, hi;
};

/*
 * Point realization for h against a sequence whose total integral is
 * smaller than that of h. The returned xi lies in [lo, hi].
 */
Realization realize_point(const Polygonal &h, const SeqView &seq, std::size_t N,
                          const RealizeOptions &opt = {});

/* Certified value of the realization hypothesis on [opt.lo, opt.hi]:
 * integral(h) - sum_{n<=N} integral(view_n) - tail(N). Positive when usable. */
Rational realize_margin(const Polygonal &h, const SeqView &seq, std::size_t N,
                        const RealizeOptions &opt = {});

/* Witness (xi, 2) using h = 2. */
DomainWitness point_in_pps(const RegularSeq &seq);

/* Rows h_{n,k}; rows at index >= count are zero. */
struct SeqFamily {
	std::function<RegularSeq(std::size_t)> row;
	std::size_t count = SIZE_MAX;
};

/* g_k = sum_{n<=k} 2^{-2n-1} h_{n,k-n}. */
RegularSeq intersect_countable(const SeqFamily &family);
RegularSeq intersect_pair(const RegularSeq &a, const RegularSeq &b);
/* A witness of the intersection bounds the prefix sums of row n. */
DomainWitness intersect_transport(const DomainWitness &w, std::size_t n);

/* g_n = ((4/3)^{2n} h_{2n} + (4/3)^{2n+1} h_{2n+1}) / 2. */
RegularSeq geometric_decay(const RegularSeq &seq);
/* A witness (x, gamma) of the decay sequence gives h_n(x) <= 2 gamma (3/4)^n. */
Rational decay_transport(const Rational &gamma, std::size_t n);

} // namespace cmeasure
