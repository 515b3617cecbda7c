/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/rational.hpp>

#include <functional>
#include <memory>

namespace cmeasure {

/*
 * Constructive real: approx(p) is within 2^-p of the represented value.
 * Approximants are memoized; the first computed value for a precision wins.
 */
class CReal {
public:
	using Approximant = std::function<Rational(unsigned)>;

	CReal();
	explicit CReal(const Rational &c);
	explicit CReal(Approximant f);

	Rational approx(unsigned p) const;

	/* Rational value, if this real was built by embedding one. */
	const Rational *exact() const;

	friend CReal operator+(const CReal &a, const CReal &b);
	friend CReal operator-(const CReal &a, const CReal &b);
	friend CReal operator-(const CReal &a);
	friend CReal operator*(const CReal &a, const CReal &b);

private:
	struct Impl;
	std::shared_ptr<Impl> impl_;
};

inline Rational rat_approx(const CReal &x, unsigned p) { return x.approx(p); }

/* Floor-rounded dyadic within 2^-p of x. */
Rational dyadic_approx(const CReal &x, unsigned p);

CReal embed(const Rational &q);
CReal scale(const CReal &x, const Rational &c);
CReal abs(const CReal &x);
CReal min(const CReal &a, const CReal &b);
CReal max(const CReal &a, const CReal &b);

/* Upper bound on |x|. */
Rational magnitude_bound(const CReal &x);

enum class Verdict { left_below, right_below };

/*
 * left_below guarantees a < b + eps, right_below guarantees b < a + eps.
 */
Verdict soft_compare(const CReal &a, const CReal &b, const Rational &eps);

/* Smallest p with 2^-p <= q, for q > 0. */
unsigned precision_for(const Rational &q);

} // namespace cmeasure
