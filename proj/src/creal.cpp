/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/creal.hpp>

#include <map>
#include <mutex>
#include <optional>

namespace cmeasure {

struct CReal::Impl {
	Approximant f;
	std::optional<Rational> value;
	std::mutex mu;
	std::map<unsigned, Rational> memo;
};

CReal::CReal() : CReal(Rational(0)) {}

CReal::CReal(const Rational &c) : impl_(std::make_shared<Impl>())
{
	impl_->value = c;
}

CReal::CReal(Approximant f) : impl_(std::make_shared<Impl>())
{
	impl_->f = std::move(f);
}

const Rational *CReal::exact() const
{
	return impl_->value ? &*impl_->value : nullptr;
}

Rational CReal::approx(unsigned p) const
{
	if (impl_->value)
		return *impl_->value;
	{
		std::lock_guard lk(impl_->mu);
		auto it = impl_->memo.find(p);
		if (it != impl_->memo.end())
			return it->second;
	}
	Rational r = impl_->f(p);
	std::lock_guard lk(impl_->mu);
	return impl_->memo.emplace(p, std::move(r)).first->second;
}

Rational dyadic_approx(const CReal &x, unsigned p)
{
	if (const Rational *e = x.exact())
		return floor_dyadic(*e, p + 1);
	return floor_dyadic(x.approx(p + 1), p + 1);
}

CReal embed(const Rational &q) { return CReal(q); }

CReal operator+(const CReal &a, const CReal &b)
{
	if (a.exact() && b.exact())
		return CReal(Rational(*a.exact() + *b.exact()));
	return CReal([a, b](unsigned p) -> Rational {
		return a.approx(p + 2) + b.approx(p + 2);
	});
}

CReal operator-(const CReal &a)
{
	if (a.exact())
		return CReal(Rational(-*a.exact()));
	return CReal([a](unsigned p) -> Rational { return -a.approx(p); });
}

CReal operator-(const CReal &a, const CReal &b) { return a + (-b); }

Rational magnitude_bound(const CReal &x)
{
	if (const Rational *e = x.exact())
		return rabs(*e);
	return rabs(x.approx(0)) + 1;
}

static unsigned extra_bits(const Rational &factor)
{
	if (factor <= 1)
		return 0;
	return static_cast<unsigned>(ceil_log2(factor));
}

CReal operator*(const CReal &a, const CReal &b)
{
	if (a.exact() && b.exact())
		return CReal(Rational(*a.exact() * *b.exact()));
	Rational k = magnitude_bound(a) + magnitude_bound(b) + 1;
	unsigned extra = extra_bits(k) + 1;
	return CReal([a, b, extra](unsigned p) -> Rational {
		return a.approx(p + extra) * b.approx(p + extra);
	});
}

CReal scale(const CReal &x, const Rational &c)
{
	if (const Rational *e = x.exact())
		return CReal(Rational(*e * c));
	unsigned extra = extra_bits(rabs(c)) + 2;
	return CReal([x, c, extra](unsigned p) -> Rational {
		return c * x.approx(p + extra);
	});
}

CReal abs(const CReal &x)
{
	if (const Rational *e = x.exact())
		return CReal(rabs(*e));
	return CReal([x](unsigned p) -> Rational { return rabs(x.approx(p + 2)); });
}

CReal min(const CReal &a, const CReal &b)
{
	if (a.exact() && b.exact())
		return CReal(rmin(*a.exact(), *b.exact()));
	return CReal([a, b](unsigned p) -> Rational {
		return rmin(a.approx(p + 2), b.approx(p + 2));
	});
}

CReal max(const CReal &a, const CReal &b)
{
	if (a.exact() && b.exact())
		return CReal(rmax(*a.exact(), *b.exact()));
	return CReal([a, b](unsigned p) -> Rational {
		return rmax(a.approx(p + 2), b.approx(p + 2));
	});
}

unsigned precision_for(const Rational &q)
{
	if (sgn(q) <= 0)
		fail_input("precision_for needs a positive bound");
	long e = -floor_log2(q);
	return e < 0 ? 0u : static_cast<unsigned>(e);
}

Verdict soft_compare(const CReal &a, const CReal &b, const Rational &eps)
{
	if (sgn(eps) <= 0)
		fail_input("soft_compare needs eps > 0");
	/* 2^-p < eps/4 */
	unsigned p = precision_for(eps / 4) + 1;
	Rational qa = a.approx(p), qb = b.approx(p);
	/* each side is off by at most 2^-p < eps/4 */
	if (qa < qb + eps / 2)
		return Verdict::left_below;
	return Verdict::right_below;
}

} // namespace cmeasure
