#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stylelab/data.hpp"
#include "stylelab/supervision.hpp"

namespace stylelab {

// Minimal INI-style reader: [section], key = value, '#' or ';' comments.
class IniFile {
public:
    static IniFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static IniFile parse(const std::string& text, const std::string& origin = "<string>") {
        IniFile ini;
        ini.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": bad section header");
                section = trim(s.substr(1, s.size() - 2));
                continue;
            }
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            ini.values_[section + "." + key] = value;
        }
        return ini;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError(origin_ + ": missing required key [" + section + "] " + key);
        mark(section, key);
        return it->second;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& def) const {
        auto it = values_.find(section + "." + key);
        mark(section, key);
        return it == values_.end() ? def : it->second;
    }

    int64_t get_int(const std::string& section, const std::string& key, int64_t def) const {
        if (!has(section, key)) {
            mark(section, key);
            return def;
        }
        return parse_int(get(section, key), section, key);
    }

    int64_t get_int(const std::string& section, const std::string& key) const {
        return parse_int(get(section, key), section, key);
    }

    double get_real(const std::string& section, const std::string& key, double def) const {
        if (!has(section, key)) {
            mark(section, key);
            return def;
        }
        const std::string v = get(section, key);
        try {
            size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config: [" + section + "] " + key + " is not a number: " + v);
        }
    }

    // every key must have been consumed by the loader; catches typos
    void check_consumed() const {
        for (const auto& [k, v] : values_)
            if (!consumed_.count(k)) throw ConfigError(origin_ + ": unknown config key " + k);
    }

    static std::string trim(const std::string& s) {
        size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::vector<std::string> split_list(const std::string& s, char sep = ',') {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                std::string t = trim(cur);
                if (!t.empty()) out.push_back(t);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        std::string t = trim(cur);
        if (!t.empty()) out.push_back(t);
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
    std::string origin_;

    void mark(const std::string& section, const std::string& key) const {
        consumed_.insert(section + "." + key);
    }

    static int64_t parse_int(const std::string& v, const std::string& section,
                             const std::string& key) {
        try {
            size_t used = 0;
            int64_t i = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (const std::exception&) {
            throw ConfigError("config: [" + section + "] " + key + " is not an integer: " + v);
        }
    }
};

struct DataConfig {
    std::string kind = "synthetic";  // synthetic | tsv
    std::string train_path, dev_path, test_path;
    int64_t vocab_min_count = 1;
    SyntheticSpec synthetic;
};

struct TrainConfig {
    int64_t epochs = 30;
    int64_t batch_size = 400;
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double clip_norm = 5.0;
    double disc_lr = 1e-4;
    int64_t lambda_steps = 0;      // anneal horizon for lambda_ae; 0: the whole run
    int64_t eval_every = 0;        // 0: once per epoch
    int64_t checkpoint_every = 0;  // 0: at eval intervals
    int64_t dev_eval_cap = 400;
};

struct ExperimentConfig {
    uint64_t seed = 0;
    Regime regime = Regime::DAE;
    std::string out_dir;
    DataConfig data;
    GeneratorConfig model;  // vocab_size filled after vocab construction
    DiscriminatorConfig disc;
    NoiseParams noise;
    TrainConfig train;
    MrtSpec mrt;
    std::string mrt_classifier_path;   // required in the MRT regime
    std::string eval_classifier_path;  // optional

    static ExperimentConfig from_file(const std::string& path) {
        IniFile ini = IniFile::parse_file(path);
        return from_ini(ini);
    }

    static ExperimentConfig from_ini(const IniFile& ini) {
        ExperimentConfig cfg;
        cfg.seed = static_cast<uint64_t>(ini.get_int("experiment", "seed"));  // mandatory
        cfg.regime = parse_regime(ini.get("experiment", "regime"));
        cfg.out_dir = ini.get("experiment", "out_dir");

        cfg.data.kind = ini.get_or("data", "kind", "synthetic");
        if (cfg.data.kind == "tsv") {
            cfg.data.train_path = ini.get("data", "train");
            cfg.data.dev_path = ini.get("data", "dev");
            cfg.data.test_path = ini.get_or("data", "test", "");
            // schema: attributeK = name: v1, v2
            cfg.data.synthetic.schema = parse_schema(ini, "data");
        } else if (cfg.data.kind == "synthetic") {
            cfg.data.synthetic = parse_synthetic(ini);
        } else {
            throw ConfigError("config: [data] kind must be synthetic or tsv");
        }
        cfg.data.vocab_min_count = ini.get_int("data", "min_count", 1);

        cfg.model.emb_dim = static_cast<int>(ini.get_int("model", "emb_dim", 512));
        cfg.model.hidden_dim = static_cast<int>(ini.get_int("model", "hidden_dim", 512));
        cfg.model.pool_window = static_cast<int>(ini.get_int("model", "pool_window", 5));
        cfg.model.max_len = static_cast<int>(ini.get_int("model", "max_len", 50));
        cfg.model.dropout = ini.get_real("model", "dropout", 0.1);
        cfg.disc.emb_dim = static_cast<int>(ini.get_int("model", "disc_emb_dim", 128));
        cfg.disc.hidden_dim = static_cast<int>(ini.get_int("model", "disc_hidden_dim", 128));

        cfg.noise.p_drop = ini.get_real("noise", "p_drop", 0.1);
        cfg.noise.shuffle_k = static_cast<int>(ini.get_int("noise", "shuffle_k", 3));

        cfg.train.epochs = ini.get_int("train", "epochs", 30);
        cfg.train.batch_size = ini.get_int("train", "batch_size", 400);
        cfg.train.lr = ini.get_real("train", "lr", 1e-4);
        cfg.train.beta1 = ini.get_real("train", "beta1", 0.5);
        cfg.train.beta2 = ini.get_real("train", "beta2", 0.999);
        cfg.train.clip_norm = ini.get_real("train", "clip_norm", 5.0);
        cfg.train.disc_lr = ini.get_real("train", "disc_lr", 1e-4);
        cfg.train.lambda_steps = ini.get_int("train", "lambda_steps", 0);
        cfg.train.eval_every = ini.get_int("train", "eval_every", 0);
        cfg.train.checkpoint_every = ini.get_int("train", "checkpoint_every", 0);
        cfg.train.dev_eval_cap = ini.get_int("train", "dev_eval_cap", 400);

        cfg.mrt.n_samples = static_cast<int>(ini.get_int("mrt", "n_samples", 10));
        cfg.mrt.alpha = ini.get_real("mrt", "alpha", 0.005);
        cfg.mrt.temperature = ini.get_real("mrt", "temperature", 1.0);
        cfg.mrt_classifier_path = ini.get_or("mrt", "classifier", "");
        cfg.eval_classifier_path = ini.get_or("eval", "classifier", "");

        if (regime_has_mrt(cfg.regime) && cfg.mrt_classifier_path.empty())
            throw ConfigError("config: the MRT regime requires [mrt] classifier = PATH");
        require_positive(cfg.train.epochs, "[train] epochs");
        require_positive(cfg.train.batch_size, "[train] batch_size");
        if (cfg.model.dropout < 0 || cfg.model.dropout >= 1)
            throw ConfigError("config: [model] dropout must be in [0, 1)");
        ini.check_consumed();
        return cfg;
    }

private:
    static void require_positive(int64_t v, const std::string& what) {
        if (v <= 0) throw ConfigError("config: " + what + " must be positive");
    }

    static AttributeSchema parse_schema(const IniFile& ini, const std::string& section) {
        AttributeSchema schema;
        for (int k = 0;; ++k) {
            std::string key = "attribute" + std::to_string(k);
            if (!ini.has(section, key)) break;
            std::string spec = ini.get(section, key);
            size_t colon = spec.find(':');
            if (colon == std::string::npos)
                throw ConfigError("config: " + key + " must look like `name: v1, v2`");
            AttributeSchema::Attribute attr;
            attr.name = IniFile::trim(spec.substr(0, colon));
            attr.values = IniFile::split_list(spec.substr(colon + 1));
            schema.attributes.push_back(std::move(attr));
        }
        if (schema.attributes.empty())
            throw ConfigError("config: [" + section + "] needs attribute0 = name: v1, v2");
        schema.validate();
        return schema;
    }

    static SyntheticSpec parse_synthetic(const IniFile& ini) {
        SyntheticSpec spec = default_sentiment_spec(
            static_cast<int>(ini.get_int("synthetic", "count", 5000)),
            static_cast<uint64_t>(ini.get_int("synthetic", "seed", 7)));
        if (ini.has("synthetic", "attribute0")) {
            spec.schema = parse_schema(ini, "synthetic");
            spec.markers.clear();
            for (int k = 0; k < spec.schema.num_attributes(); ++k) {
                std::vector<std::vector<std::string>> per_value;
                for (const auto& value : spec.schema.attributes[static_cast<size_t>(k)].values) {
                    std::string key = "markers" + std::to_string(k) + "." + value;
                    per_value.push_back(IniFile::split_list(ini.get("synthetic", key)));
                }
                spec.markers.push_back(std::move(per_value));
            }
        }
        if (ini.has("synthetic", "templates"))
            spec.templates = IniFile::split_list(ini.get("synthetic", "templates"), '|');
        if (ini.has("synthetic", "content"))
            spec.content = IniFile::split_list(ini.get("synthetic", "content"));
        spec.min_len = static_cast<int>(ini.get_int("synthetic", "min_len", spec.min_len));
        spec.max_len = static_cast<int>(ini.get_int("synthetic", "max_len", spec.max_len));
        spec.content_skew = ini.get_real("synthetic", "content_skew", spec.content_skew);
        spec.template_skew = ini.get_real("synthetic", "template_skew", spec.template_skew);
        return spec;
    }
};

}  // namespace stylelab
