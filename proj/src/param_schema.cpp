// SPDX-License-Identifier: Apache-2.0
#include <skillrt/error.hpp>
#include <skillrt/param_schema.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace skillrt
{

auto paramTypeName(ParamType type) -> std::string_view
{
    switch (type)
    {
        case ParamType::String: return "string";
        case ParamType::Integer: return "integer";
        case ParamType::Boolean: return "boolean";
        case ParamType::Number: return "number";
        case ParamType::Array: return "array";
        case ParamType::Object: return "object";
    }
    return "object";
}

namespace
{

auto parseType(Json const& value, std::string const& where) -> ParamType
{
    if (!value.is_string())
        throw Error(ErrorKind::MalformedManifest, where + "/type: expected a string");
    auto const name = value.get<std::string>();
    if (name == "string")
        return ParamType::String;
    if (name == "integer" || name == "int")
        return ParamType::Integer;
    if (name == "boolean" || name == "bool")
        return ParamType::Boolean;
    if (name == "number")
        return ParamType::Number;
    if (name == "array")
        return ParamType::Array;
    if (name == "object")
        return ParamType::Object;
    throw Error(ErrorKind::MalformedManifest, where + "/type: unknown type '" + name + "'");
}

auto typeAccepts(ParamType type, Json const& value) -> bool
{
    switch (type)
    {
        case ParamType::String: return value.is_string();
        case ParamType::Integer:
            if (value.is_number_integer())
                return true;
            if (value.is_number_float())
            {
                auto const d = value.get<double>();
                return std::isfinite(d) && std::floor(d) == d;
            }
            return false;
        case ParamType::Boolean: return value.is_boolean();
        case ParamType::Number: return value.is_number();
        case ParamType::Array: return value.is_array();
        case ParamType::Object: return value.is_object();
    }
    return false;
}

auto describe(Json const& value) -> std::string
{
    if (value.is_null())
        return "null";
    if (value.is_boolean())
        return "boolean";
    if (value.is_number_integer())
        return "integer";
    if (value.is_number())
        return "number";
    if (value.is_string())
        return "string";
    if (value.is_array())
        return "array";
    return "object";
}

void validateInto(ParamSchema const& schema, Json const& value, std::string const& path, Json& out,
                  ValidationErrors& errors)
{
    if (!typeAccepts(schema.type, value))
    {
        errors.push_back({ path,
                           "expected " + std::string(paramTypeName(schema.type)) + ", got " + describe(value) });
        return;
    }
    if (!schema.enumValues.empty())
    {
        auto hit = false;
        for (auto const& allowed: schema.enumValues)
            if (allowed == value)
                hit = true;
        if (!hit)
        {
            errors.push_back({ path, "value " + value.dump() + " is not one of the allowed values" });
            return;
        }
    }

    switch (schema.type)
    {
        case ParamType::Object: {
            out = Json::object();
            for (auto const& [key, child]: value.items())
            {
                auto const* fieldSchema = schema.field(key);
                if (!fieldSchema)
                {
                    if (schema.openObject)
                        out[key] = child;
                    else
                        errors.push_back({ path + "." + key, "unknown field" });
                }
            }
            for (auto const& f: schema.fields)
            {
                auto const childPath = path + "." + f.name;
                if (auto it = value.find(f.name); it != value.end())
                {
                    auto childOut = Json {};
                    validateInto(f.schema, *it, childPath, childOut, errors);
                    out[f.name] = std::move(childOut);
                }
                else if (schema.required.contains(f.name))
                    errors.push_back({ childPath, "required field missing" });
                else if (f.schema.defaultValue)
                    out[f.name] = *f.schema.defaultValue;
            }
            break;
        }
        case ParamType::Array: {
            if (value.size() < schema.minItems)
                errors.push_back({ path,
                                   "expected at least " + std::to_string(schema.minItems) + " item(s), got "
                                       + std::to_string(value.size()) });
            out = Json::array();
            for (size_t i = 0; i < value.size(); ++i)
            {
                auto childOut = Json {};
                if (schema.items)
                    validateInto(*schema.items, value[i], path + "[" + std::to_string(i) + "]", childOut, errors);
                else
                    childOut = value[i];
                out.push_back(std::move(childOut));
            }
            break;
        }
        default: out = value; break;
    }
}

} // namespace

auto ParamSchema::field(std::string_view name) const -> ParamSchema const*
{
    for (auto const& f: fields)
        if (f.name == name)
            return &f.schema;
    return nullptr;
}

auto ParamSchema::parse(Json const& doc, std::string const& where) -> ParamSchema
{
    if (!doc.is_object())
        throw Error(ErrorKind::MalformedManifest, where + ": parameter schema must be an object");

    static constexpr auto allowedKeys = std::array<std::string_view, 9> {
        "type", "description", "enum", "default", "properties", "required", "items", "minItems", "additionalProperties",
    };
    for (auto const& [key, _]: doc.items())
        if (std::find(allowedKeys.begin(), allowedKeys.end(), key) == allowedKeys.end())
            throw Error(ErrorKind::MalformedManifest, where + ": unknown schema key '" + key + "'");

    auto schema = ParamSchema {};
    if (!doc.contains("type"))
        throw Error(ErrorKind::MalformedManifest, where + ": missing 'type'");
    schema.type = parseType(doc.at("type"), where);

    if (auto it = doc.find("description"); it != doc.end())
    {
        if (!it->is_string())
            throw Error(ErrorKind::MalformedManifest, where + "/description: expected a string");
        schema.description = it->get<std::string>();
    }
    if (auto it = doc.find("enum"); it != doc.end())
    {
        if (!it->is_array() || it->empty())
            throw Error(ErrorKind::MalformedManifest, where + "/enum: expected a non-empty array");
        for (auto const& v: *it)
        {
            if (!typeAccepts(schema.type, v))
                throw Error(ErrorKind::MalformedManifest, where + "/enum: value " + v.dump() + " has the wrong type");
            schema.enumValues.push_back(v);
        }
    }

    auto const isObject = schema.type == ParamType::Object;
    auto const isArray = schema.type == ParamType::Array;
    for (auto key: { "properties", "required", "additionalProperties" })
        if (doc.contains(key) && !isObject)
            throw Error(ErrorKind::MalformedManifest, where + ": '" + key + "' only applies to objects");
    for (auto key: { "items", "minItems" })
        if (doc.contains(key) && !isArray)
            throw Error(ErrorKind::MalformedManifest, where + ": '" + key + "' only applies to arrays");

    if (auto it = doc.find("properties"); it != doc.end())
    {
        if (!it->is_object())
            throw Error(ErrorKind::MalformedManifest, where + "/properties: expected an object");
        for (auto const& [name, child]: it->items())
            schema.fields.push_back({ name, parse(child, where + "/properties/" + name) });
    }
    if (auto it = doc.find("required"); it != doc.end())
    {
        if (!it->is_array())
            throw Error(ErrorKind::MalformedManifest, where + "/required: expected an array");
        for (auto const& name: *it)
        {
            if (!name.is_string())
                throw Error(ErrorKind::MalformedManifest, where + "/required: expected field names");
            auto const n = name.get<std::string>();
            if (!schema.field(n))
                throw Error(ErrorKind::MalformedManifest,
                            where + "/required: '" + n + "' is not a declared property");
            schema.required.insert(n);
        }
    }
    if (auto it = doc.find("additionalProperties"); it != doc.end())
    {
        if (!it->is_boolean())
            throw Error(ErrorKind::MalformedManifest, where + "/additionalProperties: expected a boolean");
        schema.openObject = it->get<bool>();
    }
    if (auto it = doc.find("items"); it != doc.end())
        schema.items = std::make_shared<ParamSchema const>(parse(*it, where + "/items"));
    if (auto it = doc.find("minItems"); it != doc.end())
    {
        if (!it->is_number_integer() || it->get<long long>() < 0)
            throw Error(ErrorKind::MalformedManifest, where + "/minItems: expected a non-negative integer");
        schema.minItems = it->get<size_t>();
    }
    if (auto it = doc.find("default"); it != doc.end())
    {
        auto scratch = Json {};
        auto errors = ValidationErrors {};
        auto probe = schema;
        validateInto(probe, *it, "$", scratch, errors);
        if (!errors.empty())
            throw Error(ErrorKind::MalformedManifest, where + "/default: " + formatErrors(errors));
        schema.defaultValue = *it;
    }
    return schema;
}

auto ParamSchema::toJson() const -> Json
{
    auto doc = Json::object();
    doc["type"] = paramTypeName(type);
    if (!description.empty())
        doc["description"] = description;
    if (!enumValues.empty())
        doc["enum"] = enumValues;
    if (defaultValue)
        doc["default"] = *defaultValue;
    if (type == ParamType::Object)
    {
        auto props = Json::object();
        for (auto const& f: fields)
            props[f.name] = f.schema.toJson();
        doc["properties"] = std::move(props);
        if (!required.empty())
            doc["required"] = required;
        doc["additionalProperties"] = openObject;
    }
    if (type == ParamType::Array)
    {
        if (items)
            doc["items"] = items->toJson();
        if (minItems > 0)
            doc["minItems"] = minItems;
    }
    return doc;
}

auto validateAgainst(ParamSchema const& schema, Json const& args) -> ValidationResult
{
    auto out = Json {};
    auto errors = ValidationErrors {};
    validateInto(schema, args, "$", out, errors);
    if (!errors.empty())
        return errors;
    return ValidatedArgs { std::move(out) };
}

auto formatErrors(ValidationErrors const& errors) -> std::string
{
    auto text = std::string {};
    for (auto const& e: errors)
    {
        if (!text.empty())
            text += "; ";
        text += e.path + ": " + e.reason;
    }
    return text;
}

} // namespace skillrt
