#include "ddp/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "ddp/bounds.hpp"
#include "ddp/corpus.hpp"
#include "ddp/encoder.hpp"
#include "ddp/evaluation.hpp"
#include "ddp/log.hpp"
#include "ddp/model_io.hpp"
#include "ddp/relation.hpp"
#include "ddp/sentfirst.hpp"
#include "ddp/toy.hpp"
#include "json.hpp"

namespace ddp::cli {

namespace {

// Usage problems detected after flag parsing (e.g. missing model roles).
struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string corpus;
  std::string embeddings;
  std::vector<std::string> models;
  std::string model_out;
  std::string out;
  std::string trees;
  std::string pred;
  std::string pred_gold_heads;
  std::string level = "intra";
  std::string levels = "intra,inter,pair";
  std::string shape;
  std::uint64_t seed = 42;
  std::uint64_t encoder_seed = 42;
  double lr = 1e-3;
  int epochs = 10;
  int dim = kDefaultBuiltinDim;
  int hidden = 0;  // 0: 128 for feed-forward models, 256 for taggers
  int batch = 16;
  int theorem = 1;
  int sweep_max = 0;
  bool count_root_relation = true;
};

// Writes to --out when given, otherwise to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DataError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::unique_ptr<EduEncoder> make_encoder(const Options& o, int builtin_dim) {
  if (!o.embeddings.empty()) {
    auto table = std::make_shared<const EmbeddingTable>(load_embeddings(o.embeddings));
    log::info("embeddings_loaded").kv("path", o.embeddings).kv("dim", table->dim()).kv("entries", table->size());
    return std::make_unique<TableEncoder>(table, o.encoder_seed);
  }
  return std::make_unique<BuiltinEncoder>(builtin_dim, o.encoder_seed);
}

void require_encoder_dim(const EduEncoder& encoder, int expected, const std::string& what) {
  if (encoder.dim() != expected) {
    throw DataError(what + " expects " + std::to_string(expected) + "-dimensional embeddings, encoder gives " +
                    std::to_string(encoder.dim()));
  }
}

std::map<std::string, const CorpusRecord*> index_by_id(const std::vector<CorpusRecord>& records) {
  std::map<std::string, const CorpusRecord*> out;
  for (const auto& r : records) {
    if (!out.emplace(r.doc.doc_id, &r).second) throw DataError("duplicate doc_id " + r.doc.doc_id);
  }
  return out;
}

int cmd_make_toy(const Options& o) {
  const auto corpus = make_toy_corpus(o.seed);
  Output out(o.out);
  write_corpus(out.stream(), corpus);
  log::info("make_toy").kv("seed", o.seed).kv("documents", corpus.size());
  return kExitOk;
}

int cmd_encode_builtin(const Options& o) {
  std::vector<Level> levels;
  std::stringstream in(o.levels);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto level = level_from_string(item);
    if (!level) throw UsageError("unknown level \"" + item + "\"");
    levels.push_back(*level);
  }
  const auto corpus = load_corpus(o.corpus);
  BuiltinEncoder encoder(o.dim, o.encoder_seed);
  EmbeddingTable table(o.dim);
  for (const auto& r : corpus) {
    const std::vector<int> roots = sentence_roots(r.doc.sentence_spans, r.tree.heads);
    for (Level level : levels) {
      if (level == Level::kIntra) {
        for (auto& [id, v] : encoder.intra(r.doc)) table.insert({r.doc.doc_id, level, id, 0}, v);
      } else if (level == Level::kInter) {
        for (auto& [id, v] : encoder.inter(r.doc, roots)) table.insert({r.doc.doc_id, level, id, 0}, v);
      } else {
        for (const Edu& e : r.doc.edus) {
          const auto [first, second] = pair_key(e.id, r.tree.head(e.id));
          table.insert({r.doc.doc_id, level, first, second}, encoder.pair(r.doc, first, second));
        }
      }
    }
  }
  Output out(o.out);
  write_embeddings(out.stream(), table);
  log::info("encode_builtin").kv("documents", corpus.size()).kv("dim", o.dim).kv("entries", table.size());
  return kExitOk;
}

int cmd_oracle(const Options& o) {
  const auto corpus = load_corpus(o.corpus);
  Output out(o.out);
  int skipped = 0, spans = 0;
  for (const auto& r : corpus) {
    const OracleExtraction ex = extract_oracle(r.doc, r.tree, true, true);
    skipped += ex.skipped;
    for (const OracleSpan& s : ex.spans) {
      nlohmann::json j{{"doc_id", r.doc.doc_id},
                       {"level", s.sentence ? "intra" : "inter"},
                       {"sentence", s.sentence ? nlohmann::json(*s.sentence) : nlohmann::json(nullptr)},
                       {"span", s.span}};
      std::vector<std::string> actions;
      for (Action a : s.actions) actions.emplace_back(to_string(a));
      j["actions"] = actions;
      out.stream() << j.dump() << '\n';
      ++spans;
    }
  }
  log::info("oracle").kv("documents", corpus.size()).kv("spans", spans).kv("skipped", skipped);
  return kExitOk;
}

TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.learning_rate = o.lr;
  c.epochs = o.epochs;
  c.seed = o.seed;
  c.batch_size = o.batch;
  return c;
}

void log_report(std::string_view what, const TrainReport& r) {
  for (std::size_t e = 0; e < r.epoch_losses.size(); ++e) {
    if (e == 0 || (e + 1) % 10 == 0 || e + 1 == r.epoch_losses.size()) {
      log::info("epoch").kv("model", what).kv("epoch", e + 1).kv("loss", r.epoch_losses[e]);
    }
  }
  log::info("trained")
      .kv("model", what)
      .kv("initial_loss", r.initial_loss)
      .kv("final_loss", r.final_loss)
      .kv("accuracy", r.final_accuracy);
}

int cmd_train(const Options& o) {
  const auto corpus = load_corpus(o.corpus);
  const auto encoder = make_encoder(o, o.dim);
  const int dim = encoder->dim();

  if (o.level == "intra" || o.level == "inter") {
    const bool intra = o.level == "intra";
    std::vector<ClassSample> samples;
    int skipped = 0;
    for (const auto& r : corpus) {
      const OracleExtraction ex = extract_oracle(r.doc, r.tree, intra, !intra);
      skipped += ex.skipped;
      const EduVectors intra_vectors = intra ? encoder->intra(r.doc) : EduVectors{};
      for (const OracleSpan& s : ex.spans) {
        const EduVectors vectors = intra ? intra_vectors : encoder->inter(r.doc, s.span);
        for (auto& sample : oracle_samples(s, vectors, dim)) samples.push_back(std::move(sample));
      }
    }
    if (skipped > 0) log::warn("oracle_skipped").kv("level", o.level).kv("spans", skipped);
    log::info("train_start").kv("level", o.level).kv("samples", samples.size()).kv("dim", dim);
    FeedForwardModel model(kNumSlots * dim, o.hidden > 0 ? o.hidden : 128, kNumActions);
    model.initialize(o.seed);
    log_report(o.level, train(model, std::span<const ClassSample>(samples), train_config(o)));
    save_model(o.model_out, ActionModel{o.level, std::move(model)});
  } else if (o.level == "relation" || o.level == "direct") {
    std::vector<DependencyTree> trees;
    for (const auto& r : corpus) trees.push_back(r.tree);
    const RelationSet labels = RelationSet::from_trees(trees);
    RelationSamples samples;
    for (const auto& r : corpus) append_relation_samples(r.doc, r.tree, labels, *encoder, samples);
    log::info("train_start").kv("level", o.level).kv("labels", labels.size()).kv("dim", dim);
    if (o.level == "direct") {
      DirectRelationClassifier d{labels, FeedForwardModel(dim, o.hidden > 0 ? o.hidden : 128, labels.size())};
      d.model.initialize(o.seed);
      log_report("direct", train(d.model, std::span<const ClassSample>(samples.direct), train_config(o)));
      save_model(o.model_out, d);
    } else {
      const int hidden = o.hidden > 0 ? o.hidden : 256;
      StackedRelationLabeler s{labels, BiLstmTagger(dim, hidden, labels.size()),
                               BiLstmTagger(dim, hidden, labels.size())};
      s.intra_layer.initialize(o.seed);
      s.inter_layer.initialize(o.seed + 1);
      log_report("relation_layer1",
                 train(s.intra_layer, std::span<const SequenceSample>(samples.intra_layer), train_config(o)));
      log_report("relation_layer2",
                 train(s.inter_layer, std::span<const SequenceSample>(samples.inter_layer), train_config(o)));
      save_model(o.model_out, s);
    }
  } else {
    throw UsageError("unknown level \"" + o.level + "\"");
  }
  log::info("model_saved").kv("path", o.model_out).kv("level", o.level);
  return kExitOk;
}

int cmd_parse(const Options& o) {
  std::optional<FeedForwardModel> intra, inter;
  for (const auto& path : o.models) {
    ModelFile m = load_model(path);
    auto* action = std::get_if<ActionModel>(&m);
    if (!action) throw DataError(path + " is not an intra or inter action model");
    (action->level == "intra" ? intra : inter) = std::move(action->model);
  }
  if (!intra || !inter) throw UsageError("parse needs one intra and one inter model");
  if (intra->input_dim() != inter->input_dim()) throw DataError("intra and inter models use different dimensions");

  const int dim = intra->input_dim() / kNumSlots;
  const auto encoder = make_encoder(o, dim);
  require_encoder_dim(*encoder, dim, "the action models");
  const auto corpus = load_corpus(o.corpus);
  std::vector<CorpusRecord> out_records;
  for (const auto& r : corpus) {
    DocumentParse p = parse_document(r.doc, model_scorer(*intra), model_scorer(*inter), *encoder);
    out_records.push_back({r.doc, std::move(p.tree), true});
  }
  Output out(o.out);
  write_corpus(out.stream(), out_records);
  log::info("parsed").kv("documents", out_records.size());
  return kExitOk;
}

int cmd_label(const Options& o) {
  if (o.models.size() != 1) throw UsageError("label takes exactly one relation model");
  ModelFile model = load_model(o.models.front());
  const auto corpus = load_corpus(o.corpus);
  std::vector<CorpusRecord> tree_records;
  if (!o.trees.empty()) tree_records = load_corpus(o.trees);
  const auto trees = index_by_id(tree_records);

  int dim = 0;
  if (const auto* s = std::get_if<StackedRelationLabeler>(&model)) {
    dim = s->intra_layer.input_dim();
  } else if (const auto* d = std::get_if<DirectRelationClassifier>(&model)) {
    dim = d->model.input_dim();
  } else {
    throw DataError(o.models.front() + " is not a relation model");
  }
  const auto encoder = make_encoder(o, dim);
  require_encoder_dim(*encoder, dim, "the relation model");

  std::vector<CorpusRecord> out_records;
  for (const auto& r : corpus) {
    CorpusRecord rec = r;
    if (!o.trees.empty()) {
      const auto it = trees.find(r.doc.doc_id);
      if (it == trees.end()) throw DataError(o.trees + " has no tree for " + r.doc.doc_id);
      rec.tree = it->second->tree;
      rec.projective = it->second->projective;
    }
    if (const auto* s = std::get_if<StackedRelationLabeler>(&model)) {
      rec.tree.relations = label_relations(rec.doc, rec.tree, *s, *encoder);
    } else {
      rec.tree.relations = label_relations_direct(rec.doc, rec.tree, std::get<DirectRelationClassifier>(model), *encoder);
    }
    out_records.push_back(std::move(rec));
  }
  Output out(o.out);
  write_corpus(out.stream(), out_records);
  log::info("labelled").kv("documents", out_records.size());
  return kExitOk;
}

int cmd_eval(const Options& o) {
  const auto gold = load_corpus(o.corpus);
  const auto pred = load_corpus(o.pred);
  std::vector<CorpusRecord> gold_heads;
  if (!o.pred_gold_heads.empty()) gold_heads = load_corpus(o.pred_gold_heads);
  EvalOptions opts;
  opts.count_root_relation = o.count_root_relation;
  const Metrics m = evaluate_corpus(gold, pred, o.pred_gold_heads.empty() ? nullptr : &gold_heads, opts);
  std::cout << metrics_table(m);
  if (!o.out.empty()) {
    Output out(o.out);
    out.stream() << metrics_json(m) << '\n';
  }
  auto line = log::info("eval");
  line.kv("nodes", m.nodes).kv("uas", m.uas).kv("las_pred", m.las_pred);
  if (m.las_gold) line.kv("las_gold", *m.las_gold);
  return kExitOk;
}

int cmd_verify_bounds(const Options& o) {
  if (o.theorem != 1 && o.theorem != 2) throw UsageError("--theorem must be 1 or 2");
  if (o.shape.empty() == (o.sweep_max == 0)) throw UsageError("give exactly one of --shape and --sweep-max");
  std::vector<DocumentShape> shapes;
  if (!o.shape.empty()) {
    shapes.push_back(DocumentShape::parse(o.shape));
  } else {
    const int guard = o.theorem == 1 ? kMaxDependencyEdus : kMaxConstituencyLeaves;
    if (o.sweep_max < 1 || o.sweep_max > guard) {
      throw UsageError("--sweep-max must be between 1 and " + std::to_string(guard));
    }
    shapes = shapes_up_to(o.sweep_max, o.theorem == 2 ? 2 : 1);
  }
  Output out(o.out);
  int violations = 0;
  for (const auto& shape : shapes) {
    const BoundsReport r = o.theorem == 1 ? check_theorem1(shape) : check_theorem2(shape);
    out.stream() << report_json(r) << '\n';
    if (!r.holds) ++violations;
  }
  log::info("verify_bounds").kv("theorem", o.theorem).kv("shapes", shapes.size()).kv("violations", violations)
      .kv("all_hold", violations == 0 ? "true" : "false");
  return violations == 0 ? kExitOk : kExitDataError;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Discourse dependency parsing toolkit"};
  app.require_subcommand(1);

  auto* make_toy = app.add_subcommand("make-toy", "Write the synthetic toy corpus");
  make_toy->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  make_toy->add_option("--out", o.out, "Output corpus (default stdout)");

  auto* encode = app.add_subcommand("encode-builtin", "Export builtin-encoder embeddings");
  encode->add_option("--corpus", o.corpus, "Corpus NDJSON")->required();
  encode->add_option("--out", o.out, "Output embeddings (default stdout)");
  encode->add_option("--dim", o.dim, "Embedding dimension")->capture_default_str();
  encode->add_option("--levels", o.levels, "Comma-separated levels")->capture_default_str();
  encode->add_option("--encoder-seed", o.encoder_seed, "Builtin encoder seed")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Print gold transition sequences");
  oracle->add_option("--corpus", o.corpus, "Corpus NDJSON")->required();
  oracle->add_option("--out", o.out, "Output NDJSON (default stdout)");

  auto* train_cmd = app.add_subcommand("train", "Train an action or relation model");
  train_cmd->add_option("--corpus", o.corpus, "Training corpus NDJSON")->required();
  train_cmd->add_option("--level", o.level, "intra, inter, relation or direct")
      ->check(CLI::IsMember({"intra", "inter", "relation", "direct"}))
      ->capture_default_str();
  train_cmd->add_option("--model,--out", o.model_out, "Model file to write")->required();
  train_cmd->add_option("--embeddings", o.embeddings, "Embedding NDJSON (default: builtin encoder)");
  train_cmd->add_option("--dim", o.dim, "Builtin encoder dimension")->capture_default_str();
  train_cmd->add_option("--encoder-seed", o.encoder_seed, "Builtin encoder seed")->capture_default_str();
  train_cmd->add_option("--seed", o.seed, "Initialisation and shuffling seed")->capture_default_str();
  train_cmd->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch", o.batch, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--hidden", o.hidden, "Hidden size (default 128, taggers 256)");

  auto* parse = app.add_subcommand("parse", "Parse documents into unlabelled trees");
  parse->add_option("--corpus", o.corpus, "Corpus NDJSON")->required();
  parse->add_option("--model", o.models, "Intra and inter model files")->required();
  parse->add_option("--embeddings", o.embeddings, "Embedding NDJSON (default: builtin encoder)");
  parse->add_option("--encoder-seed", o.encoder_seed, "Builtin encoder seed")->capture_default_str();
  parse->add_option("--out", o.out, "Output corpus (default stdout)");

  auto* label = app.add_subcommand("label", "Assign relations to trees");
  label->add_option("--corpus", o.corpus, "Corpus NDJSON")->required();
  label->add_option("--model", o.models, "Relation model file")->required();
  label->add_option("--trees", o.trees, "Trees to label (default: the corpus trees)");
  label->add_option("--embeddings", o.embeddings, "Embedding NDJSON (default: builtin encoder)");
  label->add_option("--encoder-seed", o.encoder_seed, "Builtin encoder seed")->capture_default_str();
  label->add_option("--out", o.out, "Output corpus (default stdout)");

  auto* eval = app.add_subcommand("eval", "Score predictions against gold trees");
  eval->add_option("--corpus", o.corpus, "Gold corpus NDJSON")->required();
  eval->add_option("--pred", o.pred, "Predicted trees with relations")->required();
  eval->add_option("--pred-gold-heads", o.pred_gold_heads, "Relations predicted on gold heads");
  eval->add_option("--count-root-relation", o.count_root_relation, "Score the root relation")->capture_default_str();
  eval->add_option("--out", o.out, "JSON report");

  auto* bounds = app.add_subcommand("verify-bounds", "Check the search-space inequalities");
  bounds->add_option("--theorem", o.theorem, "1 or 2")->required();
  bounds->add_option("--shape", o.shape, "Sentence lengths, e.g. 2,3,1");
  bounds->add_option("--sweep-max", o.sweep_max, "Check every shape up to this many EDUs");
  bounds->add_option("--out", o.out, "Output JSON lines (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (make_toy->parsed()) return cmd_make_toy(o);
    if (encode->parsed()) return cmd_encode_builtin(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (train_cmd->parsed()) return cmd_train(o);
    if (parse->parsed()) return cmd_parse(o);
    if (label->parsed()) return cmd_label(o);
    if (eval->parsed()) return cmd_eval(o);
    return cmd_verify_bounds(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace ddp::cli
