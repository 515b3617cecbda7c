/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/rational.hpp>

#include <cstdint>

namespace cmeasure {

/* Open cell (k 2^-m, (k+1) 2^-m). */
struct DyadicInterval {
	std::uint64_t k = 0;
	unsigned m = 0;

	DyadicInterval() = default;
	DyadicInterval(std::uint64_t k_, unsigned m_) : k(k_), m(m_)
	{
		if (m >= 63)
			fail_input("dyadic level too deep");
		if (k >= (std::uint64_t(1) << m))
			fail_input("dyadic index out of range");
	}

	Rational left() const { return Rational(Integer(static_cast<unsigned long>(k))) * pow2(-long(m)); }
	Rational right() const { return Rational(Integer(static_cast<unsigned long>(k + 1))) * pow2(-long(m)); }
	Rational length() const { return pow2(-long(m)); }

	bool contains(const Rational &x) const { return left() < x && x < right(); }
	/* True if this cell lies inside the closure of `outer`. */
	bool inside(const DyadicInterval &outer) const
	{
		return m >= outer.m && (k >> (m - outer.m)) == outer.k;
	}

	friend bool operator==(const DyadicInterval &, const DyadicInterval &) = default;
};

} // namespace cmeasure
