#pragma once

#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "stylelab/binio.hpp"
#include "stylelab/discriminator.hpp"
#include "stylelab/generator.hpp"
#include "stylelab/schema_io.hpp"

namespace stylelab {

// Versioned binary model container; exact layout in
// docs/checkpoint-format.md. Doubles round-trip bit-exactly.
namespace ckpt {

constexpr char kMagic[4] = {'S', 'L', 'C', 'K'};
constexpr uint32_t kVersion = 1;

inline void write_params(std::ostream& os, const std::vector<Param*>& params) {
    binio::write_u32(os, static_cast<uint32_t>(params.size()));
    for (const Param* p : params) {
        binio::write_str(os, p->name);
        binio::write_tensor(os, p->value);
    }
}

inline void read_params(std::istream& is, const std::vector<Param*>& params, const char* what) {
    uint32_t n = binio::read_u32(is);
    require(n == params.size(), std::string("checkpoint: ") + what + " tensor count mismatch");
    for (uint32_t i = 0; i < n; ++i) {
        std::string name = binio::read_str(is);
        Tensor t = binio::read_tensor(is);
        if (params[i]->name != name) throw InputError("checkpoint: unexpected tensor " + name);
        if (!params[i]->value.same_shape(t))
            throw InputError("checkpoint: shape mismatch for " + name);
        params[i]->value = std::move(t);
    }
}

}  // namespace ckpt

struct Checkpoint {
    AttributeSchema schema;
    Vocab vocab;
    GeneratorParams generator;
    std::optional<DiscriminatorParams> discriminator;
};

inline void save_checkpoint(const std::string& path, const Vocab& vocab, GeneratorParams& gen,
                            DiscriminatorParams* disc = nullptr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("checkpoint: cannot open " + path + " for writing");
    os.write(ckpt::kMagic, 4);
    binio::write_u32(os, ckpt::kVersion);
    schema_io::write(os, gen.schema);
    binio::write_u32(os, static_cast<uint32_t>(vocab.size() - 4));
    for (int id = 4; id < vocab.size(); ++id) {
        binio::write_str(os, vocab.token(id));
        binio::write_i64(os, vocab.freq(id));
    }
    binio::write_i64(os, gen.cfg.vocab_size);
    binio::write_i64(os, gen.cfg.emb_dim);
    binio::write_i64(os, gen.cfg.hidden_dim);
    binio::write_i64(os, gen.cfg.pool_window);
    binio::write_i64(os, gen.cfg.max_len);
    binio::write_f64(os, gen.cfg.dropout);
    ckpt::write_params(os, gen.all());
    os.put(disc ? 1 : 0);
    if (disc) {
        binio::write_i64(os, disc->cfg.vocab_size);
        binio::write_i64(os, disc->cfg.emb_dim);
        binio::write_i64(os, disc->cfg.hidden_dim);
        ckpt::write_params(os, disc->all());
    }
    if (!os) throw InputError("checkpoint: write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, ckpt::kMagic, 4) != 0)
        throw InputError("checkpoint: bad magic in " + path);
    uint32_t version = binio::read_u32(is);
    if (version != ckpt::kVersion)
        throw InputError("checkpoint: unsupported version " + std::to_string(version));

    Checkpoint out;
    out.schema = schema_io::read(is);
    uint32_t vocab_n = binio::read_u32(is);
    for (uint32_t i = 0; i < vocab_n; ++i) {
        std::string tok = binio::read_str(is);
        int64_t freq = binio::read_i64(is);
        out.vocab.add(tok, freq);
    }
    GeneratorConfig gcfg;
    gcfg.vocab_size = static_cast<int>(binio::read_i64(is));
    gcfg.emb_dim = static_cast<int>(binio::read_i64(is));
    gcfg.hidden_dim = static_cast<int>(binio::read_i64(is));
    gcfg.pool_window = static_cast<int>(binio::read_i64(is));
    gcfg.max_len = static_cast<int>(binio::read_i64(is));
    gcfg.dropout = binio::read_f64(is);
    Rng dummy(0);
    out.generator.init(out.schema, gcfg, dummy);
    ckpt::read_params(is, out.generator.all(), "generator");
    if (is.get() == 1) {
        DiscriminatorConfig dcfg;
        dcfg.vocab_size = static_cast<int>(binio::read_i64(is));
        dcfg.emb_dim = static_cast<int>(binio::read_i64(is));
        dcfg.hidden_dim = static_cast<int>(binio::read_i64(is));
        DiscriminatorParams D;
        D.init(out.schema, dcfg, dummy);
        ckpt::read_params(is, D.all(), "discriminator");
        out.discriminator = std::move(D);
    }
    return out;
}

}  // namespace stylelab
