/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cstddef>
#include <string>

namespace cmeasure {

/*
 * Search caps. Defaults can be overridden through the CMEASURE_BUDGET
 * environment variable, e.g. "eps=48,depth=2000,ladder=20,terms=5000".
 */
struct Budget {
	unsigned eps_halvings = 64;   /* realize_point epsilon search */
	std::size_t depth = 4096;     /* bisection steps per point */
	unsigned ladder = 24;         /* refinement ladder levels */
	std::size_t terms = 100000;   /* prefix terms per bisection step */

	static const Budget &current();
	static Budget parse(const std::string &spec);
};

} // namespace cmeasure
