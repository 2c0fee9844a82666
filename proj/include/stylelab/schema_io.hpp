#pragma once

#include "stylelab/binio.hpp"
#include "stylelab/style.hpp"

namespace stylelab::schema_io {

inline void write(std::ostream& os, const AttributeSchema& schema) {
    binio::write_u32(os, static_cast<uint32_t>(schema.attributes.size()));
    for (const auto& a : schema.attributes) {
        binio::write_str(os, a.name);
        binio::write_u32(os, static_cast<uint32_t>(a.values.size()));
        for (const auto& v : a.values) binio::write_str(os, v);
    }
}

inline AttributeSchema read(std::istream& is) {
    AttributeSchema schema;
    uint32_t m = binio::read_u32(is);
    for (uint32_t k = 0; k < m; ++k) {
        AttributeSchema::Attribute a;
        a.name = binio::read_str(is);
        uint32_t n = binio::read_u32(is);
        for (uint32_t i = 0; i < n; ++i) a.values.push_back(binio::read_str(is));
        schema.attributes.push_back(std::move(a));
    }
    return schema;
}

}  // namespace stylelab::schema_io
