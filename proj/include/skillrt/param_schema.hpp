// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <skillrt/json.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace skillrt
{

enum class ParamType
{
    String,
    Integer,
    Boolean,
    Number,
    Array,
    Object,
};

[[nodiscard]] auto paramTypeName(ParamType type) -> std::string_view;

struct ParamField;

/// Node of an action's parameter tree. Parsed from a JSON-Schema subset
/// (`type`, `description`, `enum`, `default`, `properties`, `required`,
/// `items`, `minItems`, `additionalProperties`); unknown keys are rejected.
struct ParamSchema
{
    ParamType type = ParamType::Object;
    std::string description;
    std::vector<Json> enumValues;
    std::optional<Json> defaultValue;

    // Object
    std::vector<ParamField> fields;
    std::set<std::string> required;
    bool openObject = false;

    // Array
    std::shared_ptr<ParamSchema const> items;
    size_t minItems = 0;

    [[nodiscard]] auto field(std::string_view name) const -> ParamSchema const*;

    /// Throws Error(MalformedManifest) with a JSON-pointer-style location.
    [[nodiscard]] static auto parse(Json const& doc, std::string const& where = "params") -> ParamSchema;

    /// JSON-Schema rendering used for model-visible tool definitions.
    [[nodiscard]] auto toJson() const -> Json;

    auto operator==(ParamSchema const& other) const -> bool { return toJson() == other.toJson(); }
};

struct ParamField
{
    std::string name;
    ParamSchema schema;
};

struct ValidationError
{
    std::string path;
    std::string reason;

    auto operator==(ValidationError const&) const -> bool = default;
};

struct ValidatedArgs
{
    Json value;
};

using ValidationErrors = std::vector<ValidationError>;
using ValidationResult = std::variant<ValidatedArgs, ValidationErrors>;

/// Checks `args` against `schema`, filling defaults and rejecting unknown
/// fields. Total and side-effect free for any finite value tree.
[[nodiscard]] auto validateAgainst(ParamSchema const& schema, Json const& args) -> ValidationResult;

[[nodiscard]] auto formatErrors(ValidationErrors const& errors) -> std::string;

} // namespace skillrt
