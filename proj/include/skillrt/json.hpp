// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

namespace skillrt
{

using Json = nlohmann::json;

} // namespace skillrt
