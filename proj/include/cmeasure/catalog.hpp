/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/riemann.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cmeasure {

struct CatalogEntry {
	std::string name;
	std::string description;
	AEFunction function;
	std::optional<Summable> summable;
	std::optional<RiemannCertificate> certificate;
	std::optional<Rational> expected;  /* exact integral when known */
	std::string expected_source;       /* how the expected value is known */
	bool probe_only = false;           /* not integrable; used by negative probes */
};

std::vector<std::string> catalog_names();
/* Builds a fresh entry, so memo tables are never shared between runs. */
CatalogEntry catalog_entry(const std::string &name);

/* Summable of a polygonal: constant approximants, converging everywhere. */
Summable polygonal_summable(const Polygonal &h, const std::string &name);

/* x^2 through interpolants on pieces * 2^n equal pieces. */
Summable square_schedule(unsigned pieces);

/* Disjoint tents: tent_j centered at 3 2^{-j-2} with halfwidth 2^{-j-3}. */
struct TentsSeries {
	/* F_n = sum_{j<=n} 2^-j tent_j */
	std::function<Summable(std::size_t)> partial;
	/* exact integral of F_n */
	std::function<Rational(std::size_t)> partial_integral;
	/* integral of F_n beyond n, bounded by this tail */
	std::function<Rational(std::size_t)> tail;
	Summable limit;
};
TentsSeries tents_series();

} // namespace cmeasure
