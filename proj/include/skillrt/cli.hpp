// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/bindings.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace skillrt
{

/// Orchestration tools plus the bundled code-repair skill.
[[nodiscard]] auto standardBindings() -> BindingTable;

/// Entry point behind the `skillrt` executable. `args` excludes argv[0].
/// Returns 0 when the root session completed, 2 when the step budget ran
/// out and 1 on any error.
auto runCli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int;

} // namespace skillrt
