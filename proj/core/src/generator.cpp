#include "fedra/generator.hpp"

#include <algorithm>
#include <set>

#include "fedra/error.hpp"

namespace fedra {

namespace {

struct Vocabulary {
  std::vector<Term> predicates;
  std::vector<Term> constants;  // subjects and objects
};

Vocabulary vocabulary_of(const std::vector<UpdateLog>& logs) {
  std::set<Term> preds, consts;
  for (const UpdateLog& log : logs) {
    for (const UpdateOp& op : log.ops) {
      preds.insert(op.triple.predicate);
      consts.insert(op.triple.subject);
      consts.insert(op.triple.object);
    }
  }
  Vocabulary v;
  v.predicates.assign(preds.begin(), preds.end());
  v.constants.assign(consts.begin(), consts.end());
  return v;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Random BGP view: chained so patterns share variables like the paper's V1.
ViewDefinition random_view(const Vocabulary& vocab, int size, std::mt19937_64& rng) {
  ViewDefinition view;
  int var_counter = 0;
  Term link = Term::variable("x" + std::to_string(var_counter++));
  for (int i = 0; i < size; ++i) {
    TriplePattern p;
    p.subject = link;
    if (!vocab.predicates.empty() && rng() % 10 < 8)
      p.predicate = vocab.predicates[pick(rng, vocab.predicates.size())];
    else
      p.predicate = Term::variable("p" + std::to_string(var_counter++));
    if (!vocab.constants.empty() && rng() % 10 < 2)
      p.object = vocab.constants[pick(rng, vocab.constants.size())];
    else
      p.object = Term::variable("x" + std::to_string(var_counter++));
    view.body.push_back(p);
    link = p.object.is_variable() ? p.object : Term::variable("x" + std::to_string(var_counter++));
  }
  return view;
}

}  // namespace

FederationCatalog generate_federation(const std::vector<UpdateLog>& logs,
                                      const GeneratorOptions& options) {
  if (logs.empty()) throw Error("generate_federation needs at least one update log");
  if (options.consumer_endpoints < 1) throw Error("need at least one consumer endpoint");

  std::mt19937_64 rng(options.seed);
  Vocabulary vocab = vocabulary_of(logs);

  FederationCatalog cat;
  cat.now = 0;
  for (const UpdateLog& log : logs)
    for (const UpdateOp& op : log.ops) cat.now = std::max(cat.now, op.time);

  std::map<std::string, std::string> origin_endpoint;
  for (const UpdateLog& log : logs) {
    Endpoint e;
    e.id = "P-" + log.dataset_id;
    e.url = "http://" + log.dataset_id + ".origin.example.org/sparql";
    e.is_public = options.public_origins;
    origin_endpoint[log.dataset_id] = e.id;
    cat.endpoints.push_back(std::move(e));
    cat.origins.push_back({log.dataset_id, origin_endpoint[log.dataset_id]});
  }
  std::vector<std::string> consumers;
  for (int i = 1; i <= options.consumer_endpoints; ++i) {
    Endpoint e;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "C%03d", i);
    e.id = buf;
    e.url = "http://" + e.id + ".example.org/sparql";
    e.is_public = false;
    consumers.push_back(e.id);
    cat.endpoints.push_back(std::move(e));
  }

  auto epochs_of = [&](const UpdateLog& log) {
    std::vector<std::int64_t> epochs;
    for (const UpdateOp& op : log.ops)
      if (epochs.empty() || epochs.back() != op.time) epochs.push_back(op.time);
    if (epochs.empty()) epochs.push_back(0);
    return epochs;
  };

  int fragment_counter = 0;
  auto add_replica = [&](const UpdateLog& log, const ViewDefinition& view,
                         const std::string& host, std::int64_t sync_time) {
    ReplicaDescriptor r;
    r.fragment_id = "f" + std::to_string(++fragment_counter);
    r.source_dataset = log.dataset_id;
    r.source_endpoint = origin_endpoint[log.dataset_id];
    r.view = view;
    r.host = host;
    r.sync_time = sync_time;
    cat.replicas.push_back(std::move(r));
  };

  if (options.mirror_every_dataset) {
    for (std::size_t i = 0; i < logs.size(); ++i)
      add_replica(logs[i], universal_view(), consumers[i % consumers.size()], cat.now);
  }

  for (int f = 0; f < options.fragments; ++f) {
    const UpdateLog& log = logs[pick(rng, logs.size())];
    int size = options.min_view_size +
               static_cast<int>(rng() % (options.max_view_size - options.min_view_size + 1));
    ViewDefinition view = random_view(vocab, size, rng);
    int hosts = options.min_hosts +
                static_cast<int>(rng() % (options.max_hosts - options.min_hosts + 1));
    std::vector<std::int64_t> epochs = epochs_of(log);
    std::set<std::string> used;
    for (int h = 0; h < hosts; ++h) {
      const std::string& host = consumers[pick(rng, consumers.size())];
      if (!used.insert(host).second) continue;  // one copy per endpoint
      std::int64_t sync =
          options.all_fresh ? cat.now : epochs[pick(rng, epochs.size())];
      add_replica(log, view, host, sync);
    }
  }
  return cat;
}

std::string generate_query(const std::vector<UpdateLog>& logs, int max_patterns,
                           std::mt19937_64& rng) {
  Vocabulary vocab = vocabulary_of(logs);
  int n = 1 + static_cast<int>(rng() % max_patterns);
  std::string body;
  Term join_var = Term::variable("a0");
  int var_counter = 1;
  for (int i = 0; i < n; ++i) {
    TriplePattern p;
    p.subject = join_var;
    p.predicate = vocab.predicates.empty()
                      ? Term::variable("q" + std::to_string(var_counter++))
                      : vocab.predicates[pick(rng, vocab.predicates.size())];
    p.object = Term::variable("a" + std::to_string(var_counter++));
    body += "  " + pattern_to_string(p) + " .\n";
    join_var = p.object;
  }
  return "SELECT *\nWHERE {\n" + body + "}\n";
}

UpdateLog generate_log(const std::string& dataset_id, int n_ops, int n_predicates,
                       int n_constants, std::uint64_t seed, bool with_deletes) {
  std::mt19937_64 rng(seed);
  UpdateLog log;
  log.dataset_id = dataset_id;
  Graph present;
  std::int64_t time = 0;
  for (int i = 0; i < n_ops; ++i) {
    if (i > 0 && rng() % 3 == 0) ++time;  // a few ops per epoch
    Triple t{Term::bare(dataset_id + "s" + std::to_string(rng() % n_constants)),
             Term::bare("p" + std::to_string(rng() % n_predicates)),
             Term::bare(dataset_id + "o" + std::to_string(rng() % n_constants))};
    UpdateOp op;
    op.time = time;
    if (with_deletes && !present.empty() && rng() % 5 == 0) {
      auto it = present.begin();
      std::advance(it, static_cast<long>(rng() % present.size()));
      op.kind = OpKind::Delete;
      op.triple = *it;
      present.erase(it);
    } else {
      op.kind = OpKind::Insert;
      op.triple = t;
      present.insert(t);
    }
    log.ops.push_back(std::move(op));
  }
  return log;
}

}  // namespace fedra
