// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/param_schema.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace skillrt;

namespace
{

auto verificationSchema() -> ParamSchema
{
    return ParamSchema::parse(Json::parse(R"({
        "type": "object",
        "properties": {
            "checks": {
                "type": "array", "minItems": 1,
                "items": {
                    "type": "object",
                    "properties": {
                        "name": {"type": "string"},
                        "type": {"type": "string", "enum": ["command_exit_zero", "file_exists"]},
                        "args": {"type": "object", "additionalProperties": true}
                    },
                    "required": ["name", "type", "args"]
                }
            },
            "label": {"type": "string", "default": "run"}
        },
        "required": ["checks"]
    })"));
}

auto errorsOf(ValidationResult const& r) -> ValidationErrors
{
    auto const* e = std::get_if<ValidationErrors>(&r);
    return e ? *e : ValidationErrors {};
}

auto randomJson(std::mt19937& rng, int depth) -> Json
{
    switch (rng() % (depth > 0 ? 7 : 5))
    {
        case 0: return nullptr;
        case 1: return rng() % 2 == 0;
        case 2: return static_cast<int>(rng() % 100) - 50;
        case 3: return 0.5 * static_cast<double>(rng() % 10);
        case 4: return std::string(rng() % 4, 'x');
        case 5: {
            auto a = Json::array();
            for (auto i = 0u; i < rng() % 4; ++i)
                a.push_back(randomJson(rng, depth - 1));
            return a;
        }
        default: {
            static auto const keys = std::vector<std::string> { "checks", "name", "type", "args", "label", "zz" };
            auto o = Json::object();
            for (auto i = 0u; i < rng() % 4; ++i)
                o[keys[rng() % keys.size()]] = randomJson(rng, depth - 1);
            return o;
        }
    }
}

} // namespace

TEST_CASE("valid arguments are accepted and defaults filled")
{
    auto const result = validateAgainst(verificationSchema(), Json::parse(R"({
        "checks": [{"name": "unit", "type": "file_exists", "args": {"path": "a.py", "extra": 1}}]
    })"));
    REQUIRE(std::holds_alternative<ValidatedArgs>(result));
    auto const& v = std::get<ValidatedArgs>(result).value;
    CHECK(v["label"] == "run");
    CHECK(v["checks"][0]["args"]["extra"] == 1);
}

TEST_CASE("errors carry JSON paths")
{
    auto const schema = verificationSchema();
    auto errors = errorsOf(validateAgainst(schema, Json::parse(R"({"checks": [{"name": "x", "type": "bogus", "args": {}}]})")));
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].path == "$.checks[0].type");

    errors = errorsOf(validateAgainst(schema, Json::parse(R"({"checks": []})")));
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].path == "$.checks");
    CHECK(errors[0].reason == "expected at least 1 item(s), got 0");

    errors = errorsOf(validateAgainst(schema, Json::parse(R"({"chekcs": []})")));
    REQUIRE(errors.size() == 2);
    CHECK(errors[0] == ValidationError { "$.chekcs", "unknown field" });
    CHECK(errors[1] == ValidationError { "$.checks", "required field missing" });

    errors = errorsOf(validateAgainst(schema, Json::parse(R"({"checks": [{"name": 3, "type": "file_exists", "args": {}}]})")));
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].path == "$.checks[0].name");
    CHECK(errors[0].reason.starts_with("expected string"));
}

TEST_CASE("malformed schemas are rejected at parse time")
{
    CHECK_THROWS_AS(ParamSchema::parse(Json::parse(R"({"type": "object", "pattern": "x"})")), Error);
    CHECK_THROWS_AS(ParamSchema::parse(Json::parse(R"({"type": "tuple"})")), Error);
    CHECK_THROWS_AS(ParamSchema::parse(Json::parse(R"({"type": "array", "minItems": -1})")), Error);
    CHECK_THROWS_AS(ParamSchema::parse(Json::parse(R"({"type": "string", "enum": [1]})")), Error);
}

TEST_CASE("schema rendering round-trips")
{
    auto const schema = verificationSchema();
    CHECK(ParamSchema::parse(schema.toJson()) == schema);
}

TEST_CASE("validation is total and deterministic on arbitrary values")
{
    auto const schema = verificationSchema();
    auto rng = std::mt19937(1234);
    for (auto i = 0; i < 2000; ++i)
    {
        auto const value = randomJson(rng, 4);
        auto const a = validateAgainst(schema, value);
        auto const b = validateAgainst(schema, value);
        CHECK(a.index() == b.index());
        if (auto const* ok = std::get_if<ValidatedArgs>(&a))
        {
            // accepted values re-validate to themselves
            auto const again = validateAgainst(schema, ok->value);
            REQUIRE(std::holds_alternative<ValidatedArgs>(again));
            CHECK(std::get<ValidatedArgs>(again).value == ok->value);
        }
        else
            CHECK_FALSE(std::get<ValidationErrors>(a).empty());
    }
}
