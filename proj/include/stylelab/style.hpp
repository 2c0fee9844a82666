#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// The style space: m named attributes, each with a finite value set.
struct AttributeSchema {
    struct Attribute {
        std::string name;
        std::vector<std::string> values;
    };

    std::vector<Attribute> attributes;

    int num_attributes() const { return static_cast<int>(attributes.size()); }

    void validate() const {
        require(!attributes.empty(), "schema: at least one attribute required");
        for (size_t i = 0; i < attributes.size(); ++i) {
            require(attributes[i].values.size() >= 2, "schema: each attribute needs >= 2 values");
            for (size_t j = i + 1; j < attributes.size(); ++j)
                require(attributes[i].name != attributes[j].name, "schema: duplicate attribute name");
            for (size_t a = 0; a < attributes[i].values.size(); ++a)
                for (size_t b = a + 1; b < attributes[i].values.size(); ++b)
                    require(attributes[i].values[a] != attributes[i].values[b],
                            "schema: duplicate value within attribute");
        }
    }

    int attribute_index(const std::string& name) const {
        for (size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int value_index(int attr, const std::string& value) const {
        const auto& vals = attributes[static_cast<size_t>(attr)].values;
        for (size_t i = 0; i < vals.size(); ++i)
            if (vals[i] == value) return static_cast<int>(i);
        return -1;
    }

    int num_values(int attr) const {
        return static_cast<int>(attributes[static_cast<size_t>(attr)].values.size());
    }

    int total_values() const {
        int n = 0;
        for (const auto& a : attributes) n += static_cast<int>(a.values.size());
        return n;
    }

    int64_t num_style_combinations() const {
        int64_t n = 1;
        for (const auto& a : attributes) n *= static_cast<int64_t>(a.values.size());
        return n;
    }

    bool operator==(const AttributeSchema& o) const {
        if (attributes.size() != o.attributes.size()) return false;
        for (size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name != o.attributes[i].name ||
                attributes[i].values != o.attributes[i].values)
                return false;
        return true;
    }
    bool operator!=(const AttributeSchema& o) const { return !(*this == o); }
};

// One value index per attribute.
struct StyleVector {
    std::vector<int> values;

    bool operator==(const StyleVector& o) const { return values == o.values; }
    bool operator!=(const StyleVector& o) const { return !(*this == o); }
};

inline void validate_style(const StyleVector& s, const AttributeSchema& schema) {
    if (static_cast<int>(s.values.size()) != schema.num_attributes())
        throw ContractError("style: attribute count mismatch");
    for (int k = 0; k < schema.num_attributes(); ++k)
        if (s.values[static_cast<size_t>(k)] < 0 ||
            s.values[static_cast<size_t>(k)] >= schema.num_values(k))
            throw ContractError("style: value out of range for attribute " +
                                schema.attributes[static_cast<size_t>(k)].name);
}

// "attr=value;attr=value" (order = schema order).
inline std::string format_style(const StyleVector& s, const AttributeSchema& schema) {
    std::string out;
    for (int k = 0; k < schema.num_attributes(); ++k) {
        if (k) out += ';';
        out += schema.attributes[static_cast<size_t>(k)].name;
        out += '=';
        out += schema.attributes[static_cast<size_t>(k)].values[static_cast<size_t>(s.values[static_cast<size_t>(k)])];
    }
    return out;
}

// Parses "attr=value;..."; every schema attribute must be present exactly once.
inline StyleVector parse_style(const std::string& text, const AttributeSchema& schema) {
    StyleVector s;
    s.values.assign(static_cast<size_t>(schema.num_attributes()), -1);
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find(';', pos);
        if (end == std::string::npos) end = text.size();
        std::string part = text.substr(pos, end - pos);
        // trim
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.front()))) part.erase(part.begin());
        while (!part.empty() && std::isspace(static_cast<unsigned char>(part.back()))) part.pop_back();
        if (!part.empty()) {
            size_t eq = part.find('=');
            if (eq == std::string::npos) throw InputError("style: missing '=' in \"" + part + "\"");
            std::string attr = part.substr(0, eq);
            std::string value = part.substr(eq + 1);
            int ai = schema.attribute_index(attr);
            if (ai < 0) throw InputError("style: unknown attribute \"" + attr + "\"");
            int vi = schema.value_index(ai, value);
            if (vi < 0) throw InputError("style: unknown value \"" + value + "\" for attribute \"" + attr + "\"");
            if (s.values[static_cast<size_t>(ai)] != -1)
                throw InputError("style: attribute \"" + attr + "\" given twice");
            s.values[static_cast<size_t>(ai)] = vi;
        }
        pos = end + 1;
    }
    for (int k = 0; k < schema.num_attributes(); ++k)
        if (s.values[static_cast<size_t>(k)] == -1)
            throw InputError("style: attribute \"" + schema.attributes[static_cast<size_t>(k)].name +
                             "\" missing");
    return s;
}

// Per-attribute probability vectors over the value sets.
struct StyleDistribution {
    std::vector<std::vector<double>> probs;

    void validate(const AttributeSchema& schema) const {
        require(static_cast<int>(probs.size()) == schema.num_attributes(),
                "style distribution: attribute count mismatch");
        for (int k = 0; k < schema.num_attributes(); ++k) {
            const auto& p = probs[static_cast<size_t>(k)];
            require(static_cast<int>(p.size()) == schema.num_values(k),
                    "style distribution: value count mismatch");
            double s = 0;
            for (double v : p) {
                require(v >= 0, "style distribution: negative probability");
                s += v;
            }
            require(std::abs(s - 1.0) <= 1e-9, "style distribution: not normalized");
        }
    }
};

}  // namespace stylelab
