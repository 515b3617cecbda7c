/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/ae_function.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace cmeasure {

/* Sub-cell tag (k, m, n) of a net cell: sample from I_{k,m} with depth n. */
struct NetCell {
	std::uint64_t k = 0;
	unsigned m = 0;
	unsigned n = 0;
	friend bool operator==(const NetCell &, const NetCell &) = default;
};

struct NetIndex {
	unsigned m = 0;
	std::vector<NetCell> cells;

	/* Level-m partition with cells tagged (l, m, n). */
	static NetIndex canonical(unsigned m, unsigned n);
	/* Throws on a size mismatch or a tag outside its cell. */
	void validate() const;
	/* Directed order: compares the levels. */
	bool after(const NetIndex &o) const { return m > o.m; }
};

struct RiemannCertificate {
	std::function<NetIndex(const Rational &eps)> modulus;
};

/* Certificate for functions whose net values on a level-m cell vary by at
 * most L 2^-m: level m is the smallest with (L + 1/4) 2^-m < eps. */
RiemannCertificate lipschitz_certificate(const Rational &L, unsigned n = 3);

/* Net function with its rational step coefficients. */
struct NetFunction {
	NetIndex index;
	std::vector<Rational> coeffs;
	Summable summable;
	Rational coefficient_error; /* each coefficient is within this of f(zeta) */
};

/* Exact integral of |a - b| for step functions on levels ma, mb. */
Rational step_l1_distance(const std::vector<Rational> &a, unsigned ma,
                          const std::vector<Rational> &b, unsigned mb);

/*
 * Per-function state of the Riemann-to-Lebesgue construction. All tables
 * are memoized and write-once.
 */
class Bridge {
public:
	explicit Bridge(AEFunction f);

	const AEFunction &function() const;

	/* Strict sublevel set of h_n at (2/3)^n. */
	const IntervalUnion &delta_union(unsigned n) const;
	Rational delta_defect(unsigned n) const;
	/* Delta_n cap ... cap Delta_K. */
	const IntervalUnion &gamma_prefix(unsigned n, unsigned K) const;
	/* Bound 4 (3/4)^{K+1} on the defects beyond K. */
	static Rational gamma_tail(unsigned K);
	Rational gamma_lower_bound(unsigned n, unsigned K) const;
	/* Witness bound for f's domain valid at every point of Gamma_n. */
	Rational gamma_witness_bound(unsigned n) const;

	bool theta(std::uint64_t k, unsigned m, unsigned n) const;
	/* Estimate of mes(I_{k,m} cap Gamma_n) within 4^-m/8. */
	Rational theta_estimate(std::uint64_t k, unsigned m, unsigned n) const;
	const DomainWitness &zeta(std::uint64_t k, unsigned m, unsigned n) const;
	/* dyadic approximation of f(zeta_{k,m,n}) within 2^-bits. */
	Rational coefficient(std::uint64_t k, unsigned m, unsigned n, unsigned bits) const;

	/* Point of the open cell I_{k,m} inside Gamma_n; requires theta. */
	DomainWitness gamma_point(std::uint64_t k, unsigned m, unsigned n) const;

	std::size_t zeta_count() const;

private:
	struct Impl;
	std::shared_ptr<Impl> impl_;
};

MeasurableSet build_delta(const Bridge &b, unsigned n);

struct GammaSet {
	MeasurableSet set;
	Rational lower_bound;
};
GammaSet build_gamma(const Bridge &b, unsigned n, unsigned K);

bool theta_membership(const Bridge &b, std::uint64_t k, unsigned m, unsigned n);
DomainWitness sample_zeta(const Bridge &b, std::uint64_t k, unsigned m, unsigned n);

NetFunction net_function(const Bridge &b, const NetIndex &alpha);

struct ProbeReport {
	Rational max_l1;
	Rational error;
	std::size_t trials;
};
ProbeReport mean_cauchy_probe(const Bridge &b, const NetIndex &alpha, std::size_t trials,
                              std::uint64_t seed);

struct Conversion {
	Summable g;
	std::function<const NetFunction &(std::size_t)> net;  /* F_j */
};
Conversion convert_to_lebesgue(const Bridge &b, const RiemannCertificate &cert);

struct EqualityReport {
	unsigned n = 0;
	std::vector<unsigned> ladder;        /* m_k */
	std::vector<Rational> ladder_l1;     /* integral |g_{k+1} - g_k| */
	std::size_t samples = 0;
	std::size_t passed = 0;
	Rational ladder_integral;            /* integral of the last ladder step */
	std::vector<Rational> sample_points; /* rational approximants of the samples */
};

/*
 * Samples points of Theta-positive cells inside Gamma_n and compares f with
 * the ladder value of g there, adding `offset` to g.
 */
EqualityReport equality_region_check(const Bridge &b, unsigned n, std::size_t S, unsigned q,
                                     std::uint64_t seed, const Rational &offset = Rational(0));

} // namespace cmeasure
