#pragma once

#include <vector>

#include "stylelab/discriminator.hpp"
#include "stylelab/generator.hpp"

namespace stylelab::testutil {

inline AttributeSchema binary_schema() {
    AttributeSchema s;
    s.attributes = {{"sentiment", {"negative", "positive"}}};
    return s;
}

inline GeneratorConfig tiny_gen_cfg(int vocab = 12) {
    GeneratorConfig cfg;
    cfg.vocab_size = vocab;
    cfg.emb_dim = 5;
    cfg.hidden_dim = 4;
    cfg.pool_window = 2;
    cfg.max_len = 8;
    cfg.dropout = 0.0;
    return cfg;
}

inline GeneratorParams tiny_generator(uint64_t seed, int vocab = 12,
                                      AttributeSchema schema = binary_schema()) {
    GeneratorParams P;
    Rng rng(seed);
    P.init(schema, tiny_gen_cfg(vocab), rng);
    return P;
}

inline DiscriminatorParams tiny_discriminator(uint64_t seed, int vocab = 12,
                                              AttributeSchema schema = binary_schema()) {
    DiscriminatorParams D;
    DiscriminatorConfig cfg;
    cfg.vocab_size = vocab;
    cfg.emb_dim = 5;
    cfg.hidden_dim = 4;
    Rng rng(seed);
    D.init(schema, cfg, rng);
    return D;
}

inline std::vector<int> random_seq(Rng& rng, int vocab, int min_len, int max_len) {
    int len = min_len + static_cast<int>(rng.below(static_cast<uint64_t>(max_len - min_len + 1)));
    std::vector<int> ids;
    for (int i = 0; i < len; ++i)
        ids.push_back(4 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab - 4))));
    return ids;
}

}  // namespace stylelab::testutil
