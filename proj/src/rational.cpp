/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/rational.hpp>

namespace cmeasure {

std::string to_string(const Rational &q)
{
	return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view s)
{
	std::string str(s);
	if (str.empty())
		fail_input("empty rational");
	for (char c : str)
		if (!(c == '-' || c == '/' || (c >= '0' && c <= '9')))
			fail_input("malformed rational '" + str + "'");
	Rational q;
	if (q.set_str(str, 10) != 0 || q.get_den() == 0)
		fail_input("malformed rational '" + str + "'");
	q.canonicalize();
	return q;
}

Rational make_rational(long num, unsigned long den)
{
	Rational q(num, den);
	q.canonicalize();
	return q;
}

Rational pow2(long e)
{
	Rational r;
	if (e >= 0) {
		mpz_ui_pow_ui(r.get_num_mpz_t(), 2, static_cast<unsigned long>(e));
	} else {
		r.get_num() = 1;
		mpz_ui_pow_ui(r.get_den_mpz_t(), 2, static_cast<unsigned long>(-e));
	}
	return r;
}

Rational rpow(const Rational &base, unsigned long e)
{
	Rational r;
	mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
	mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
	r.canonicalize();
	return r;
}

Rational rabs(const Rational &q) { return sgn(q) < 0 ? Rational(-q) : q; }

const Rational &rmin(const Rational &a, const Rational &b) { return b < a ? b : a; }
const Rational &rmax(const Rational &a, const Rational &b) { return a < b ? b : a; }

Integer rfloor(const Rational &q)
{
	Integer r;
	mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return r;
}

Integer rceil(const Rational &q)
{
	Integer r;
	mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return r;
}

long ceil_log2(const Rational &q)
{
	if (sgn(q) <= 0)
		fail_input("ceil_log2 of non-positive value");
	long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2))
	       - static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
	while (pow2(e) < q)
		++e;
	while (pow2(e - 1) >= q)
		--e;
	return e;
}

long floor_log2(const Rational &q)
{
	long e = ceil_log2(q);
	return pow2(e) == q ? e : e - 1;
}

Rational floor_dyadic(const Rational &q, long bits)
{
	Rational s = q * pow2(bits);
	return Rational(rfloor(s)) * pow2(-bits);
}

double to_double(const Rational &q) { return q.get_d(); }

} // namespace cmeasure
