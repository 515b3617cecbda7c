/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/dyadic.hpp>
#include <cmeasure/rational.hpp>

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace cmeasure {

/*
 * Continuous piecewise-linear function on [0,1] with rational breakpoints.
 * Stored in canonical form: strictly increasing breakpoints from 0 to 1,
 * no interior breakpoint where the slope does not change.
 */
class Polygonal {
public:
	/* The zero function. */
	Polygonal();
	Polygonal(std::vector<Rational> t, std::vector<Rational> v);

	static Polygonal constant(const Rational &c);
	static Polygonal identity();
	/* Peak `height` at `center`, zero outside (center-halfwidth, center+halfwidth),
	 * restricted to [0,1]. */
	static Polygonal tent(const Rational &center, const Rational &halfwidth,
	                      const Rational &height = Rational(1));

	const std::vector<Rational> &breakpoints() const;
	const std::vector<Rational> &values() const;
	std::size_t size() const { return breakpoints().size(); }

	Rational eval(const Rational &x) const;
	Rational integral() const;
	/* Exact integral over [a,b], 0 <= a <= b <= 1. */
	Rational integral(const Rational &a, const Rational &b) const;

	Rational min_value() const;
	Rational max_value() const;
	/* Largest absolute slope. */
	Rational lipschitz() const;
	/* The function vanishes outside [support_lo, support_hi];
	 * support_lo > support_hi when it vanishes identically. */
	const Rational &support_lo() const;
	const Rational &support_hi() const;
	bool is_zero() const;

	friend bool operator==(const Polygonal &a, const Polygonal &b);

private:
	struct Data;
	explicit Polygonal(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
	static Polygonal build(std::vector<Rational> t, std::vector<Rational> v);
	std::shared_ptr<const Data> d_;
	std::size_t segment(const Rational &x) const;
	friend class PolygonalOps;
};

enum class LatticeOp { add, sub, scale, abs, min, max };

/* Binary ops use both operands; scale and abs use only h1 (and c for scale). */
Polygonal lattice_linear(const Polygonal &h1, const Polygonal &h2, LatticeOp op,
                         const Rational &c = Rational(1));

Polygonal operator+(const Polygonal &a, const Polygonal &b);
Polygonal operator-(const Polygonal &a, const Polygonal &b);
Polygonal operator*(const Rational &c, const Polygonal &a);
Polygonal abs(const Polygonal &a);
Polygonal min(const Polygonal &a, const Polygonal &b);
Polygonal max(const Polygonal &a, const Polygonal &b);

/* Exact integral of |a - b| without materializing the difference. */
Rational l1_distance(const Polygonal &a, const Polygonal &b);

struct Interval {
	Rational lo, hi;
	friend bool operator==(const Interval &, const Interval &) = default;
};

/* Finite union of disjoint open intervals inside [0,1], sorted. */
class IntervalUnion {
public:
	IntervalUnion() = default;
	explicit IntervalUnion(std::vector<Interval> parts);
	static IntervalUnion unit();

	const std::vector<Interval> &parts() const { return parts_; }
	Rational length() const;
	bool contains(const Rational &x) const;
	IntervalUnion intersect(const IntervalUnion &o) const;
	IntervalUnion intersect(const Rational &lo, const Rational &hi) const;
	/* Length of the part inside (lo, hi). */
	Rational length_in(const Rational &lo, const Rational &hi) const;
	/* All interval endpoints, sorted and deduplicated. */
	std::vector<Rational> endpoints() const;

	friend bool operator==(const IntervalUnion &, const IntervalUnion &) = default;

private:
	std::vector<Interval> parts_;
};

/* Open set {x : h(x) < theta}, as a finite interval union. */
IntervalUnion sublevel(const Polygonal &h, const Rational &theta);

/* Trapezoid on (lo,hi): 0 at the ends, 1 on the middle, ramps of width
 * 2^-(j+2) (hi-lo). */
Polygonal indicator_approx(const Rational &lo, const Rational &hi, unsigned j);
Polygonal indicator_approx(const DyadicInterval &I, unsigned j);
/* Sum of the component trapezoids. */
Polygonal indicator_approx(const IntervalUnion &U, unsigned j);
/* Sum over the level-m cells of coeffs[l] times the cell trapezoid. */
Polygonal step_approx(const std::vector<Rational> &coeffs, unsigned m, unsigned j);

std::string to_json(const Polygonal &h);
Polygonal polygonal_from_json(const std::string &text);

} // namespace cmeasure
