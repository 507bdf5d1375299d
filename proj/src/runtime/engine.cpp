#include "lila/runtime/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lila/cdm/convert.hpp"
#include "lila/datalog/evaluate.hpp"
#include "lila/patterns/ilp.hpp"

namespace lila::runtime {

using synth::RgKind;
using synth::RgNode;
using synth::RouteGraph;
using Clock = std::chrono::steady_clock;

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(make_error("io", "cannot read " + p.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(make_error("io", "cannot write " + p.string()));
  out << text;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  return base / p;
}

std::size_t count_exposed(const cdm::Message& m, const std::vector<std::string>& exposed) {
  std::size_t n = 0;
  for (const auto& p : exposed) n += m.body.facts.relation(p).size();
  return n;
}

/// Payloads of one file sink merged into one document.
std::string merge_payloads(const std::vector<std::string>& payloads, cdm::Format f) {
  if (payloads.size() == 1) return payloads.front();
  std::string out;
  if (f == cdm::Format::json) {
    for (const auto& p : payloads) {
      auto inner = p.size() >= 2 ? p.substr(1, p.size() - 2) : std::string();
      if (inner.empty()) continue;
      out += (out.empty() ? "" : ",") + inner;
    }
    return "[" + out + "]";
  }
  std::string sep = f == cdm::Format::csv ? "\r\n" : "\n";
  for (const auto& p : payloads) {
    if (p.empty()) continue;
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string extension(cdm::Format f) {
  switch (f) {
    case cdm::Format::json: return ".json";
    case cdm::Format::csv: return ".csv";
    case cdm::Format::datalog: return ".dl";
  }
  return "";
}

cdm::MessagePtr enrich(const RgNode& node, const cdm::Message& msg, const std::filesystem::path& base) {
  patterns::EnrichData data;
  if (node.config.uri.empty()) {
    data.program.facts = node.config.facts;
    data.meta = node.config.meta;
  } else {
    auto ep = EndpointUri::parse(node.config.uri);
    if (ep.scheme != Scheme::file) {
      throw Error(make_error("endpoint", "enricher source " + node.config.uri + " is not a file"));
    }
    auto loaded = cdm::to_cdm(read_text(resolve(base, ep.path)), *node.config.format);
    data.program = loaded.body;
    data.meta = loaded.header.meta;
  }
  return cdm::share(patterns::ep_ilp(msg, data));
}

/// Nodes whose output depends only on the current message.
std::vector<cdm::MessagePtr> apply_stateless(const RgNode& node, const datalog::RuleSet* rules,
                                             const cdm::MessagePtr& msg, const std::filesystem::path& base) {
  const auto& c = node.config;
  switch (node.kind) {
    case RgKind::content_filter:
    case RgKind::translator: return {cdm::share(patterns::mt_ilp(*msg, *rules, c.exposed))};
    case RgKind::message_filter:
      for (const auto& cond : c.conditions) {
        if (patterns::message_filter(*msg, cond)) return {msg};
      }
      return {};
    case RgKind::renaming_translator: return {cdm::share(patterns::rename_predicates(*msg, c.suffix))};
    case RgKind::splitter: {
      std::vector<cdm::MessagePtr> out;
      for (auto& m : patterns::split_raw(*msg, {c.queries})) out.push_back(cdm::share(std::move(m)));
      return out;
    }
    case RgKind::enricher_call: return {enrich(node, *msg, base)};
    default: return {msg};
  }
}

bool stateless(RgKind k) {
  switch (k) {
    case RgKind::content_filter:
    case RgKind::translator:
    case RgKind::message_filter:
    case RgKind::renaming_translator:
    case RgKind::splitter:
    case RgKind::enricher_call: return true;
    default: return false;
  }
}

struct Pending {
  std::size_t node = 0;
  Exchange ex;
  bool flush = false;  // complete the aggregator's collection now
};

struct RouteState {
  std::mutex m;
  std::recursive_mutex exec;
  std::deque<Pending> inbox;
  bool scheduled = false;
};

struct NodeState {
  std::optional<datalog::RuleSet> rules;
  // joinAggregator: per-port FIFO, ports in first-arrival order
  std::vector<std::string> port_order;
  std::map<std::string, std::deque<Exchange>> ports;
  // aggregator
  std::vector<Exchange> collection;
  Clock::time_point started;
};

class Engine {
 public:
  Engine(const RouteGraph& rg, const RunOptions& opt) : rg_(rg), opt_(opt), state_(rg.nodes.size()) {
    for (std::size_t r = 0; r < rg.routes.size(); ++r) routes_.push_back(std::make_unique<RouteState>());
    report_.nodes.resize(rg.nodes.size());
    for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
      const auto& n = rg.nodes[i];
      if (n.kind == RgKind::content_filter || n.kind == RgKind::translator) state_[i].rules.emplace(n.config.rules);
      if (n.kind == RgKind::to_direct) {
        auto target = rg.receiver(n.config.uri);
        if (!target) throw WiringError(make_error("wiring", "channel " + n.config.uri + " has no receiver"));
        link_[i] = *target;
      }
      if (n.kind == RgKind::to_endpoint) {
        sink_of_[i] = report_.sinks.size();
        report_.sinks.push_back({n.config.uri, EndpointUri::parse(n.config.uri), {}});
      }
      if (n.kind == RgKind::from_endpoint) {
        auto ep = EndpointUri::parse(n.config.uri);
        if (ep.scheme == Scheme::direct) {
          throw WiringError(make_error("wiring", "source " + n.config.uri + " cannot read a direct channel"));
        }
      }
    }
    // Sink format comes from the converter feeding it.
    for (const auto& [id, s] : sink_of_) {
      auto preds = rg.predecessors(id);
      if (!preds.empty() && rg.nodes[preds.front()].config.format) {
        sink_format_[id] = rg.nodes[preds.front()].config.format->format;
      }
    }
  }

  RunReport run() {
    start_ = Clock::now();
    std::size_t workers = 0;
    if (opt_.parallel) {
      workers = opt_.workers ? opt_.workers : std::max<std::size_t>(2, std::thread::hardware_concurrency());
    }
    for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { worker(); });
    try {
      if (opt_.mode == Mode::batch) {
        poll_sources();
        settle();
      } else {
        auto last_poll = Clock::now() - std::chrono::milliseconds(opt_.poll_millis);
        while (!(opt_.stop && opt_.stop())) {
          if (Clock::now() - last_poll >= std::chrono::milliseconds(opt_.poll_millis)) {
            poll_sources();
            last_poll = Clock::now();
          }
          quiesce();
          sweep(false);
          quiesce();
          std::this_thread::sleep_for(std::chrono::milliseconds(opt_.sweep_millis));
        }
        settle();
      }
    } catch (...) {
      shutdown();
      throw;
    }
    shutdown();
    finish();
    return std::move(report_);
  }

 private:
  const RouteGraph& rg_;
  RunOptions opt_;
  std::vector<std::unique_ptr<RouteState>> routes_;
  std::vector<NodeState> state_;
  std::map<std::size_t, std::size_t> link_;
  std::map<std::size_t, std::size_t> sink_of_;
  std::map<std::size_t, cdm::Format> sink_format_;
  std::map<std::size_t, std::filesystem::file_time_type> seen_mtime_;
  std::set<std::size_t> polled_once_;

  std::mutex q_m_;
  std::condition_variable q_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::size_t> ready_;
  std::size_t outstanding_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;

  std::mutex book_m_;
  RunReport report_;
  std::vector<std::string> traces_;
  std::map<std::string, std::string> source_payload_;
  std::set<std::string> delivered_;
  std::set<std::string> failed_;
  std::size_t next_trace_ = 1;
  Clock::time_point start_;

  std::int64_t now_millis() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
  }

  void count(std::size_t node, std::size_t NodeCounters::*field, std::size_t n = 1) {
    std::lock_guard lk(book_m_);
    report_.nodes[node].*field += n;
  }

  // Scheduling

  void deliver(std::size_t node, Exchange ex, bool flush = false) {
    auto r = rg_.nodes[node].route;
    auto& rs = *routes_[r];
    bool schedule = false;
    {
      std::lock_guard lk(q_m_);
      ++outstanding_;
    }
    {
      std::lock_guard lk(rs.m);
      rs.inbox.push_back({node, std::move(ex), flush});
      if (!rs.scheduled) {
        rs.scheduled = true;
        schedule = true;
      }
    }
    if (schedule) {
      std::lock_guard lk(q_m_);
      ready_.push_back(r);
      q_cv_.notify_one();
    }
  }

  void drain(std::size_t r) {
    auto& rs = *routes_[r];
    for (;;) {
      Pending p;
      {
        std::lock_guard lk(rs.m);
        if (rs.inbox.empty()) {
          rs.scheduled = false;
          return;
        }
        p = std::move(rs.inbox.front());
        rs.inbox.pop_front();
      }
      {
        std::lock_guard exec(rs.exec);
        execute(p.node, std::move(p.ex), p.flush, nullptr);
      }
      std::lock_guard lk(q_m_);
      if (--outstanding_ == 0) idle_cv_.notify_all();
    }
  }

  void worker() {
    for (;;) {
      std::size_t r = 0;
      {
        std::unique_lock lk(q_m_);
        q_cv_.wait(lk, [&] { return stopping_ || !ready_.empty(); });
        if (ready_.empty()) return;
        r = ready_.front();
        ready_.pop_front();
      }
      drain(r);
    }
  }

  void quiesce() {
    if (threads_.empty()) {
      for (;;) {
        std::size_t r = 0;
        {
          std::lock_guard lk(q_m_);
          if (ready_.empty()) return;
          r = ready_.front();
          ready_.pop_front();
        }
        drain(r);
      }
    }
    std::unique_lock lk(q_m_);
    idle_cv_.wait(lk, [&] { return outstanding_ == 0; });
  }

  /// Drains, then completes time-based collections until nothing moves.
  void settle() {
    quiesce();
    sweep(true);
    quiesce();
  }

  void shutdown() {
    {
      std::lock_guard lk(q_m_);
      stopping_ = true;
    }
    q_cv_.notify_all();
    for (auto& t : threads_) t.join();
    threads_.clear();
  }

  void sweep(bool flush_all) {
    flush_all_ = flush_all;
    for (std::size_t i = 0; i < rg_.nodes.size(); ++i) {
      const auto& n = rg_.nodes[i];
      if (n.kind != RgKind::aggregator || !n.config.aggregator.completion_millis) continue;
      deliver(i, Exchange{}, true);
    }
  }
  std::atomic<bool> flush_all_ = false;

  // Sources

  std::vector<std::string> read_source(std::size_t id, bool& fresh) {
    const auto& uri = rg_.nodes[id].config.uri;
    fresh = false;
    if (auto it = opt_.inputs.find(uri); it != opt_.inputs.end()) {
      fresh = polled_once_.insert(id).second;
      return fresh ? it->second : std::vector<std::string>{};
    }
    auto ep = EndpointUri::parse(uri);
    if (ep.scheme == Scheme::mock) {
      fresh = polled_once_.insert(id).second;
      if (!fresh) return {};
      auto it = opt_.mock_inputs.find(ep.path);
      return it == opt_.mock_inputs.end() ? std::vector<std::string>{} : it->second;
    }
    auto path = resolve(opt_.base_dir, ep.path);
    if (opt_.mode == Mode::watch) {
      std::error_code ec;
      auto t = std::filesystem::last_write_time(path, ec);
      if (ec) return {};
      auto it = seen_mtime_.find(id);
      if (it != seen_mtime_.end() && it->second == t) return {};
      seen_mtime_[id] = t;
    }
    fresh = true;
    std::string text = read_text(path);
    if (opt_.split_arrays && !text.empty()) {
      auto doc = nlohmann::json::parse(text, nullptr, false);
      if (!doc.is_discarded() && doc.is_array()) {
        std::vector<std::string> out;
        for (const auto& el : doc) out.push_back(nlohmann::json::array({el}).dump());
        return out;
      }
    }
    return {text};
  }

  std::string new_trace(const std::string& payload) {
    std::lock_guard lk(book_m_);
    std::string id = "x" + std::to_string(next_trace_++);
    traces_.push_back(id);
    source_payload_[id] = payload;
    ++report_.consumed;
    return id;
  }

  void poll_sources() {
    for (std::size_t i = 0; i < rg_.nodes.size(); ++i) {
      if (rg_.nodes[i].kind != RgKind::from_endpoint) continue;
      std::vector<std::string> payloads;
      bool fresh = false;
      try {
        payloads = read_source(i, fresh);
      } catch (const std::exception& e) {
        if (opt_.mode == Mode::watch) continue;
        Exchange ex;
        ex.trace_id = new_trace("");
        ex.origins = {ex.trace_id};
        fail(i, ex, e.what());
        continue;
      }
      for (auto& p : payloads) {
        Exchange ex;
        ex.trace_id = new_trace(p);
        ex.origins = {ex.trace_id};
        ex.payload = std::make_shared<const std::string>(std::move(p));
        deliver(i, std::move(ex));
      }
    }
  }

  // Execution

  void fail(std::size_t node, const Exchange& ex, const std::string& what) {
    DeadLetter d;
    d.trace_id = ex.trace_id;
    d.node = node;
    d.error = what;
    {
      std::lock_guard lk(book_m_);
      ++report_.nodes[node].errored;
      for (const auto& o : ex.origins) failed_.insert(o);
      auto it = source_payload_.find(ex.trace_id);
      if (it != source_payload_.end()) d.payload = it->second;
      report_.dead_letters.push_back(d);
    }
    if (opt_.dead_letter_dir) {
      nlohmann::json j;
      j["traceId"] = d.trace_id;
      j["node"] = rg_.nodes[node].label();
      j["error"] = d.error;
      j["payload"] = d.payload;
      auto hops = nlohmann::json::array();
      for (const auto& [n, t] : ex.hops) hops.push_back({{"node", n}, {"millis", t}});
      j["hops"] = hops;
      try {
        write_text(*opt_.dead_letter_dir / (d.trace_id + ".json"), j.dump(2) + "\n");
      } catch (const std::exception&) {
        // the report still carries the dead letter
      }
    }
  }

  /// Runs an exchange through its route from `node`; what leaves the end of
  /// the route is appended to `collect` when given (request-reply calls).
  void execute(std::size_t node, Exchange ex, bool flush, std::vector<Exchange>* collect) {
    std::deque<std::pair<std::size_t, Exchange>> work;
    work.emplace_back(node, std::move(ex));
    bool first = true;
    while (!work.empty()) {
      auto [n, cur] = std::move(work.front());
      work.pop_front();
      std::vector<Exchange> outs;
      bool flushing = first && flush;
      first = false;
      if (!flushing) count(n, &NodeCounters::consumed);
      if (opt_.trace_hops) cur.hops.emplace_back(n, now_millis());
      try {
        outs = step(n, cur, flushing);
      } catch (const std::exception& e) {
        fail(n, cur, e.what());
        continue;
      }
      count(n, &NodeCounters::produced, outs.size());
      const auto& kind = rg_.nodes[n].kind;
      if (kind == RgKind::to_endpoint) continue;
      if (kind == RgKind::to_direct && !rg_.nodes[n].config.call) {
        for (auto& o : outs) {
          o.port = std::to_string(n);
          deliver(link_.at(n), std::move(o));
        }
        continue;
      }
      auto succs = rg_.successors(n);
      if (succs.empty()) {
        if (collect) {
          for (auto& o : outs) collect->push_back(std::move(o));
        }
        continue;
      }
      for (auto& o : outs) {
        for (auto s : succs) work.emplace_back(s, o);
      }
    }
  }

  std::vector<Exchange> step(std::size_t id, Exchange ex, bool flush) {
    const auto& node = rg_.nodes[id];
    const auto& c = node.config;
    auto& st = state_[id];
    auto with = [&](cdm::MessagePtr m) {
      Exchange out = ex;
      out.message = std::move(m);
      return out;
    };
    if (stateless(node.kind)) {
      std::vector<Exchange> out;
      for (auto& m : apply_stateless(node, st.rules ? &*st.rules : nullptr, ex.message, opt_.base_dir)) {
        out.push_back(with(std::move(m)));
      }
      if (out.empty()) count(id, &NodeCounters::dropped);
      return out;
    }
    switch (node.kind) {
      case RgKind::from_endpoint:
      case RgKind::from_direct:
      case RgKind::multicast: return {ex};
      case RgKind::format_converter: {
        if (c.to_cdm) {
          auto m = cdm::share(cdm::to_cdm(*ex.payload, *c.format));
          std::lock_guard lk(book_m_);
          report_.records_consumed += m->body.facts.size();
          Exchange out = with(m);
          out.payload.reset();
          return {out};
        }
        Exchange out = ex;
        out.payload = std::make_shared<const std::string>(cdm::from_cdm(*ex.message, *c.format, c.exposed));
        out.records = count_exposed(*ex.message, c.exposed);
        return {out};
      }
      case RgKind::to_endpoint: {
        write_sink(id, ex);
        return {ex};
      }
      case RgKind::to_direct: {
        if (!c.call) return {ex};
        // Request-reply: the original, then whatever the called route returns.
        auto target = link_.at(id);
        std::vector<Exchange> replies;
        {
          auto& callee = *routes_[rg_.nodes[target].route];
          std::lock_guard exec(callee.exec);
          execute(target, ex, false, &replies);
        }
        std::vector<Exchange> out;
        Exchange orig = ex;
        orig.port = "call:" + std::to_string(id) + ":in";
        out.push_back(orig);
        for (auto& r : replies) {
          r.port = "call:" + std::to_string(id) + ":reply";
          out.push_back(std::move(r));
        }
        return out;
      }
      case RgKind::join_aggregator: {
        if (!st.ports.count(ex.port)) st.port_order.push_back(ex.port);
        st.ports[ex.port].push_back(ex);
        std::size_t size = c.aggregator.completion_size.value_or(2);
        std::vector<std::string> ready;
        for (const auto& p : st.port_order) {
          if (!st.ports[p].empty()) ready.push_back(p);
        }
        if (ready.size() < size) return {};
        ready.resize(size);
        std::vector<Exchange> parts;
        for (const auto& p : ready) {
          parts.push_back(std::move(st.ports[p].front()));
          st.ports[p].pop_front();
        }
        return {merge(parts)};
      }
      case RgKind::aggregator: {
        const auto& cfg = c.aggregator;
        if (!flush) {
          auto key = patterns::crc_ilp(*ex.message, cfg);
          if (std::none_of(key.begin(), key.end(), [](bool b) { return b; })) {
            count(id, &NodeCounters::dropped);
            return {};
          }
          if (st.collection.empty()) st.started = Clock::now();
          st.collection.push_back(ex);
        }
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - st.started).count();
        bool done = patterns::cpc_ilp(st.collection.size(), cfg, elapsed) ||
                    (flush && flush_all_ && cfg.completion_millis && !st.collection.empty());
        if (!done) return {};
        auto parts = std::move(st.collection);
        st.collection.clear();
        return {merge(parts)};
      }
      default: break;
    }
    throw Error(make_error("internal", "no behavior for " + node.label()));
  }

  Exchange merge(const std::vector<Exchange>& parts) {
    std::vector<cdm::Message> msgs;
    for (const auto& p : parts) msgs.push_back(*p.message);
    Diagnostics warnings;
    Exchange out;
    out.message = cdm::share(patterns::union_raw(msgs, &warnings));
    out.trace_id = parts.front().trace_id;
    for (const auto& p : parts) out.origins.insert(p.origins.begin(), p.origins.end());
    out.hops = parts.front().hops;
    if (!warnings.empty()) {
      std::lock_guard lk(book_m_);
      report_.warnings.insert(report_.warnings.end(), warnings.begin(), warnings.end());
    }
    return out;
  }

  void write_sink(std::size_t id, const Exchange& ex) {
    std::lock_guard lk(book_m_);
    auto& sink = report_.sinks[sink_of_.at(id)];
    sink.payloads.push_back(*ex.payload);
    report_.records_produced += ex.records;
    for (const auto& o : ex.origins) delivered_.insert(o);
    if (sink.endpoint.scheme != Scheme::file) return;
    auto fmt = sink_format_.count(id) ? sink_format_.at(id) : cdm::Format::json;
    auto path = resolve(opt_.base_dir, sink.endpoint.path);
    if (path.has_extension()) {
      write_text(path, merge_payloads(sink.payloads, fmt));
    } else {
      write_text(path / (ex.trace_id + "-" + std::to_string(sink.payloads.size()) + extension(fmt)), *ex.payload);
    }
  }

  void finish() {
    std::lock_guard lk(book_m_);
    for (const auto& t : traces_) {
      if (failed_.count(t)) {
        ++report_.errored;
      } else if (delivered_.count(t)) {
        ++report_.produced;
      } else {
        ++report_.dropped;
      }
    }
    for (std::size_t i = 0; i < state_.size(); ++i) {
      std::size_t pending = state_[i].collection.size();
      for (const auto& [p, q] : state_[i].ports) pending += q.size();
      if (pending) {
        report_.nodes[i].dropped += pending;
        report_.warnings.push_back(make_warning(
            "incomplete", rg_.nodes[i].label() + " still holds " + std::to_string(pending) + " message(s)"));
      }
    }
    report_.wall_millis =
        std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }
};

}  // namespace

EndpointUri EndpointUri::parse(const std::string& uri) {
  auto colon = uri.find(':');
  if (colon == std::string::npos) return {Scheme::file, uri};
  std::string scheme = uri.substr(0, colon);
  std::string rest = uri.substr(colon + 1);
  if (scheme == "file") return {Scheme::file, rest};
  if (scheme == "mock") return {Scheme::mock, rest};
  if (scheme == "direct") return {Scheme::direct, uri};
  auto last = uri.rfind(':');
  return {Scheme::mock, uri.substr(last + 1)};
}

std::vector<std::string> RunReport::mock_sink(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& s : sinks) {
    if (s.endpoint.scheme == Scheme::mock && s.endpoint.path == name) {
      out.insert(out.end(), s.payloads.begin(), s.payloads.end());
    }
  }
  return out;
}

std::vector<std::string> RunReport::sink(const std::string& uri) const {
  std::vector<std::string> out;
  for (const auto& s : sinks) {
    if (s.uri == uri) out.insert(out.end(), s.payloads.begin(), s.payloads.end());
  }
  return out;
}

std::string RunReport::to_json(const RouteGraph& rg) const {
  nlohmann::json j;
  j["consumed"] = consumed;
  j["produced"] = produced;
  j["dropped"] = dropped;
  j["errored"] = errored;
  j["recordsConsumed"] = records_consumed;
  j["recordsProduced"] = records_produced;
  auto ns = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes.size() && i < rg.nodes.size(); ++i) {
    ns.push_back({{"id", i},
                  {"label", rg.nodes[i].label()},
                  {"route", rg.nodes[i].route},
                  {"consumed", nodes[i].consumed},
                  {"produced", nodes[i].produced},
                  {"dropped", nodes[i].dropped},
                  {"errored", nodes[i].errored}});
  }
  j["nodes"] = ns;
  auto ss = nlohmann::json::array();
  for (const auto& s : sinks) ss.push_back({{"uri", s.uri}, {"payloads", s.payloads.size()}});
  j["sinks"] = ss;
  auto ds = nlohmann::json::array();
  for (const auto& d : dead_letters) {
    ds.push_back({{"traceId", d.trace_id}, {"node", rg.nodes[d.node].label()}, {"error", d.error}});
  }
  j["deadLetters"] = ds;
  return j.dump(2) + "\n";
}

RunReport run(const RouteGraph& rg, const RunOptions& options) { return Engine(rg, options).run(); }

DirectChannels::DirectChannels(const RouteGraph& rg) {
  for (const auto& n : rg.nodes) {
    if (n.kind == RgKind::from_direct) queues_[n.config.uri];
  }
}

void DirectChannels::send_direct(const std::string& channel, Exchange ex) {
  auto it = queues_.find(channel);
  if (it == queues_.end()) throw WiringError(make_error("wiring", "undeclared channel " + channel));
  it->second.push_back(std::move(ex));
}

std::optional<Exchange> DirectChannels::receive_direct(const std::string& channel) {
  auto it = queues_.find(channel);
  if (it == queues_.end()) throw WiringError(make_error("wiring", "undeclared channel " + channel));
  auto& head = heads_[channel];
  if (head >= it->second.size()) return std::nullopt;
  return std::move(it->second[head++]);
}

std::size_t DirectChannels::pending(const std::string& channel) const {
  auto it = queues_.find(channel);
  if (it == queues_.end()) return 0;
  auto h = heads_.find(channel);
  return it->second.size() - (h == heads_.end() ? 0 : h->second);
}

struct Pipeline::Stage {
  RgNode node;
  std::optional<datalog::RuleSet> rules;
};

Pipeline::Pipeline(const RouteGraph& rg) {
  auto sources = rg.nodes_of(RgKind::from_endpoint);
  if (sources.empty()) throw WiringError(make_error("wiring", "the graph has no source"));
  std::optional<std::size_t> n = sources.front();
  while (n) {
    const auto& node = rg.nodes[*n];
    if (stateless(node.kind)) {
      auto st = std::make_shared<Stage>();
      st->node = node;
      if (node.kind == RgKind::content_filter || node.kind == RgKind::translator) st->rules.emplace(node.config.rules);
      stages_.push_back(st);
    } else if (node.kind == RgKind::multicast || node.kind == RgKind::join_aggregator ||
               node.kind == RgKind::aggregator || (node.kind == RgKind::to_direct && node.config.call)) {
      throw WiringError(make_error("wiring", node.label() + " needs the engine"));
    }
    auto succs = rg.successors(*n);
    n = succs.empty() ? std::nullopt : std::optional<std::size_t>(succs.front());
  }
}

std::vector<cdm::MessagePtr> Pipeline::process(const cdm::MessagePtr& message) const {
  std::vector<cdm::MessagePtr> cur{message};
  for (const auto& st : stages_) {
    std::vector<cdm::MessagePtr> next;
    for (const auto& m : cur) {
      for (auto& o : apply_stateless(st->node, st->rules ? &*st->rules : nullptr, m, ".")) next.push_back(std::move(o));
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<RgKind> Pipeline::kinds() const {
  std::vector<RgKind> out;
  for (const auto& st : stages_) out.push_back(st->node.kind);
  return out;
}

}  // namespace lila::runtime
