/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <cmeasure/catalog.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>

namespace cmeasure {

enum class Format { json, csv };

/* A command's result. Every numeric field is a rational string. */
struct Report {
	bool ok = true;
	nlohmann::ordered_json json;
	std::vector<std::string> csv_header;
	std::vector<std::vector<std::string>> csv_rows;

	std::string render(Format f) const;
};

struct RunOptions {
	bool timings = false;  /* wall-clock fields make reports non-reproducible */
};

Report cmd_integrate(const std::string &function, unsigned p, const std::string &method,
                     const RunOptions &opt = {});
Report cmd_net_table(const std::string &function, unsigned m_min, unsigned m_max,
                     unsigned n = 3, const RunOptions &opt = {});
/* Suites: regularity, witnesses, integrals, bridge. `corrupted` injects
 * faults into the catalog so the suite must fail. */
Report cmd_verify(const std::string &suite, std::uint64_t seed, bool corrupted = false,
                  const RunOptions &opt = {});
Report cmd_catalog();

/* 0 ok, 2 input error, 3 certification failure, 4 budget exhausted. */
int exit_code(ErrorKind k);
constexpr int exit_ok = 0;
constexpr int exit_failed_check = 3;

/* Error report with the same layout as command reports. */
Report error_report(const std::string &command, const Error &e);

} // namespace cmeasure
