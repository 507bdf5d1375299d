#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lila/cdm/message.hpp"
#include "lila/diagnostics.hpp"
#include "lila/synth/route_graph.hpp"

namespace lila::runtime {

/// A message on its way through the graph. Before the inbound format
/// converter only `payload` is set.
struct Exchange {
  cdm::MessagePtr message;
  std::shared_ptr<const std::string> payload;
  std::string trace_id;
  std::set<std::string> origins;  // source traces merged into this exchange
  std::vector<std::pair<std::size_t, std::int64_t>> hops;
  std::string port;  // inbound channel as seen by a join aggregator
  std::size_t records = 0;
};

enum class Scheme { file, mock, direct };

struct EndpointUri {
  Scheme scheme = Scheme::mock;
  std::string path;  // file path, mock name or channel name

  /// `file:x`, `mock:x`, `direct:x`; a bare path is a file. Any other scheme
  /// (twitter:, jdbc:) maps to a mock named by the last `:` segment.
  static EndpointUri parse(const std::string& uri);
};

class WiringError : public Error {
 public:
  using Error::Error;
};

enum class Mode { batch, watch };

struct RunOptions {
  std::filesystem::path base_dir = ".";
  Mode mode = Mode::batch;
  /// Multicast targets and distinct routes run on worker threads.
  bool parallel = true;
  std::size_t workers = 0;  // 0: hardware concurrency, at least 2
  /// A JSON array read by a file consumer becomes one payload per element.
  bool split_arrays = false;
  std::int64_t poll_millis = 500;
  std::int64_t sweep_millis = 100;
  /// Watch mode runs until this returns true (checked every poll).
  std::function<bool()> stop;
  std::optional<std::filesystem::path> dead_letter_dir;
  /// Payloads consumed by `mock:<name>` sources, and payloads replacing what
  /// any source URI would read.
  std::map<std::string, std::vector<std::string>> mock_inputs;
  std::map<std::string, std::vector<std::string>> inputs;
  /// Record hop logs on exchanges (dead letters carry them).
  bool trace_hops = false;
};

struct NodeCounters {
  std::size_t consumed = 0;
  std::size_t produced = 0;
  std::size_t dropped = 0;
  std::size_t errored = 0;
};

struct DeadLetter {
  std::string trace_id;
  std::size_t node = 0;
  std::string error;
  std::string payload;  // original source payload
};

struct Sink {
  std::string uri;
  EndpointUri endpoint;
  std::vector<std::string> payloads;
};

struct RunReport {
  /// Source payloads, and their traces that reached a sink, were filtered
  /// out or pending everywhere, or failed.
  std::size_t consumed = 0;
  std::size_t produced = 0;
  std::size_t dropped = 0;
  std::size_t errored = 0;
  std::size_t records_consumed = 0;
  std::size_t records_produced = 0;
  std::vector<NodeCounters> nodes;
  std::vector<Sink> sinks;
  std::vector<DeadLetter> dead_letters;
  Diagnostics warnings;
  double wall_millis = 0;

  /// Payloads captured by the mock sink `name` (empty if none).
  std::vector<std::string> mock_sink(const std::string& name) const;
  /// Payloads sent to the endpoint written as `uri`.
  std::vector<std::string> sink(const std::string& uri) const;
  std::string to_json(const synth::RouteGraph& rg) const;
};

/// Executes the graph. Batch mode drains every source once and returns when
/// nothing is in flight; time-completed aggregators are flushed at the end.
RunReport run(const synth::RouteGraph& rg, const RunOptions& options = {});

/// In-memory direct channels: FIFO per channel, delivered once.
class DirectChannels {
 public:
  explicit DirectChannels(const synth::RouteGraph& rg);
  /// Throws WiringError for a channel without a fromDirect receiver.
  void send_direct(const std::string& channel, Exchange ex);
  std::optional<Exchange> receive_direct(const std::string& channel);
  std::size_t pending(const std::string& channel) const;

 private:
  std::map<std::string, std::vector<Exchange>> queues_;
  std::map<std::string, std::size_t> heads_;
};

/// Stateless nodes of one route applied in order, endpoints and converters
/// skipped; used for measuring pattern cost without I/O.
class Pipeline {
 public:
  /// The route starting with the graph's first source.
  explicit Pipeline(const synth::RouteGraph& rg);

  std::vector<cdm::MessagePtr> process(const cdm::MessagePtr& message) const;
  std::vector<synth::RgKind> kinds() const;

 private:
  struct Stage;
  std::vector<std::shared_ptr<const Stage>> stages_;
};

}  // namespace lila::runtime
