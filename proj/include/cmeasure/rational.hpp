/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cmeasure {

/* Exact rational. mpq_class results of arithmetic are always canonical. */
using Rational = mpq_class;
using Integer = mpz_class;

enum class ErrorKind { input, certification, budget };

struct Error : std::runtime_error {
	ErrorKind kind;
	Error(ErrorKind k, const std::string &what)
	: std::runtime_error(what), kind(k) {}
};

[[noreturn]] inline void fail_input(const std::string &m)
{ throw Error(ErrorKind::input, m); }
[[noreturn]] inline void fail_certification(const std::string &m)
{ throw Error(ErrorKind::certification, m); }
[[noreturn]] inline void fail_budget(const std::string &m)
{ throw Error(ErrorKind::budget, m); }

/* Wire format "p/q", denominator always present. */
std::string to_string(const Rational &q);
Rational parse_rational(std::string_view s);

Rational make_rational(long num, unsigned long den = 1);

/* 2^e for any integer e. */
Rational pow2(long e);
Rational rpow(const Rational &base, unsigned long e);

Rational rabs(const Rational &q);
const Rational &rmin(const Rational &a, const Rational &b);
const Rational &rmax(const Rational &a, const Rational &b);

Integer rfloor(const Rational &q);
Integer rceil(const Rational &q);

/* Smallest e with q <= 2^e, for q > 0. */
long ceil_log2(const Rational &q);
/* Largest e with 2^e <= q, for q > 0. */
long floor_log2(const Rational &q);

/* Nearest-below multiple of 2^-bits. Error < 2^-bits. */
Rational floor_dyadic(const Rational &q, long bits);

double to_double(const Rational &q);

} // namespace cmeasure
