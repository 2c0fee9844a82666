#include <CLI11.hpp>

#include "stylelab/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stylelab: a desk-scale laboratory for unsupervised text style transfer"};
    app.require_subcommand(1);

    std::string config_path;
    auto* train = app.add_subcommand("train", "train a generator under a supervision regime");
    train->add_option("--config", config_path, "experiment config file")->required();

    std::string ckpt, in_path, styles_path, out_path;
    auto* transfer = app.add_subcommand("transfer", "rewrite texts toward target styles");
    transfer->add_option("--ckpt", ckpt, "model checkpoint")->required();
    transfer->add_option("--in", in_path, "input texts, one per line")->required();
    transfer->add_option("--styles", styles_path, "target styles, one attr=value;... per line")
        ->required();
    transfer->add_option("--out", out_path, "output predictions file")->required();

    stylelab::EvaluateArgs eargs;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against the metric suite");
    evaluate->add_option("--in", eargs.inputs_path, "input texts")->required();
    evaluate->add_option("--pred", eargs.predictions_path, "predicted texts")->required();
    evaluate->add_option("--styles", eargs.styles_path, "target styles")->required();
    evaluate->add_option("--refs", eargs.references_path, "reference texts (enables BLEU)");
    evaluate->add_option("--corpus", eargs.corpus_path, "training TSV for metric artifacts")
        ->required();
    evaluate->add_option("--ckpt-dir", eargs.ckpt_dir,
                         "checkpoint directory: also emit per-checkpoint accuracy/sBLEU and "
                         "content-MSE curves");
    evaluate->add_option("--out-dir", eargs.out_dir, "report output directory")->required();
    evaluate->add_flag_callback("--no-cache", [&] { eargs.use_cache = false; },
                                "retrain metric artifacts instead of using the cache");

    std::string synth_config, synth_out;
    auto* synth = app.add_subcommand("synth", "materialize a synthetic corpus as TSV files");
    synth->add_option("--config", synth_config, "experiment config file")->required();
    synth->add_option("--out-dir", synth_out, "directory for train/dev/test TSVs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : stylelab::kUsageError;
    }

    if (train->parsed()) return stylelab::cmd_train(config_path);
    if (transfer->parsed()) return stylelab::cmd_transfer(ckpt, in_path, styles_path, out_path);
    if (evaluate->parsed()) return stylelab::cmd_evaluate(eargs);
    if (synth->parsed()) return stylelab::cmd_synth(synth_config, synth_out);
    return stylelab::kUsageError;
}
