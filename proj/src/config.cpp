#include "ssq/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <toml.hpp>

#include "ssq/error.hpp"

namespace ssq {

namespace {

constexpr std::size_t kMaxSweepPoints = 100000;

void check_keys(const toml::table& table, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [key, node] : table) {
    bool known = false;
    for (auto a : allowed) known = known || key.str() == a;
    if (!known) throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
  }
}

const toml::table* subtable(const toml::table& parent, std::string_view key) {
  const toml::node* node = parent.get(key);
  if (!node) return nullptr;
  if (!node->is_table()) throw ConfigError("'" + std::string(key) + "' must be a table");
  return node->as_table();
}

std::optional<double> number(const toml::table& table, std::string_view key, std::string_view where) {
  const toml::node* node = table.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value_exact<double>()) return *v;
  if (auto v = node->value_exact<std::int64_t>()) return static_cast<double>(*v);
  throw ConfigError(std::string(where) + "." + std::string(key) + " must be a number");
}

double finite_number(double v, std::string_view what) {
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
  return v;
}

std::optional<std::string> text(const toml::table& table, std::string_view key, std::string_view where) {
  const toml::node* node = table.get(key);
  if (!node) return std::nullopt;
  if (auto v = node->value_exact<std::string>()) return *v;
  throw ConfigError(std::string(where) + "." + std::string(key) + " must be a string");
}

FilterSpec parse_filter(const toml::table& t, const std::string& base_dir, std::string_view where) {
  check_keys(t, {"kind", "loss", "eta", "table"}, where);
  const auto kind = text(t, "kind", where);
  if (!kind) throw ConfigError(std::string(where) + ".kind is required");
  FilterSpec spec;
  if (*kind == "identity") {
    spec.kind = FilterSpec::Kind::identity;
    if (t.contains("loss") || t.contains("eta") || t.contains("table"))
      throw ConfigError(std::string(where) + ": identity filter takes no parameters");
  } else if (*kind == "parabolic") {
    spec.kind = FilterSpec::Kind::parabolic;
    spec.loss = number(t, "loss", where);
    spec.eta = number(t, "eta", where);
    if (spec.loss.has_value() == spec.eta.has_value())
      throw ConfigError(std::string(where) + ": parabolic filter needs exactly one of 'loss' or 'eta'");
    if (t.contains("table")) throw ConfigError(std::string(where) + ": parabolic filter takes no table");
    if (spec.loss && !(*spec.loss > 0.0 && *spec.loss < 1.0))
      throw ConfigError(std::string(where) + ".loss must lie in (0, 1)");
    if (spec.eta && !(std::isfinite(*spec.eta) && *spec.eta > 0.0))
      throw ConfigError(std::string(where) + ".eta must be positive");
  } else if (*kind == "custom") {
    spec.kind = FilterSpec::Kind::custom;
    const auto path = text(t, "table", where);
    if (!path) throw ConfigError(std::string(where) + ": custom filter needs 'table'");
    if (t.contains("loss") || t.contains("eta")) throw ConfigError(std::string(where) + ": custom filter takes only 'table'");
    spec.table_path = *path;
    std::filesystem::path resolved(*path);
    if (resolved.is_relative()) resolved = std::filesystem::path(base_dir) / resolved;
    spec.table = read_filter_table(resolved.string());
    for (const TablePoint& p : spec.table) {
      if (!std::isfinite(p.omega) || !std::isfinite(p.transfer.real()) || !std::isfinite(p.transfer.imag()))
        throw ConfigError("filter table '" + *path + "' contains non-finite values");
      if (std::abs(p.transfer) > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "filter table '" << *path << "' violates realizability: |H(" << p.omega << ")| = " << std::abs(p.transfer)
            << " > 1";
        throw InvariantError(msg.str());
      }
    }
  } else {
    throw ConfigError(std::string(where) + ".kind must be identity, parabolic or custom (got '" + *kind + "')");
  }
  return spec;
}

SweepSpec parse_sweep(const toml::table& t, std::size_t n_stages) {
  check_keys(t, {"stage_index", "lengths", "range"}, "[sweep]");
  SweepSpec sweep;
  if (const toml::node* node = t.get("stage_index")) {
    const auto v = node->value_exact<std::int64_t>();
    if (!v || *v < 0) throw ConfigError("sweep.stage_index must be a non-negative integer");
    sweep.stage_index = static_cast<std::size_t>(*v);
  } else {
    sweep.stage_index = n_stages - 1;
  }
  if (sweep.stage_index >= n_stages)
    throw ConfigError("sweep.stage_index " + std::to_string(sweep.stage_index) + " does not name a stage (have " +
                      std::to_string(n_stages) + ")");

  const bool has_list = t.contains("lengths");
  const bool has_range = t.contains("range");
  if (has_list == has_range) throw ConfigError("sweep needs exactly one of 'lengths' or 'range'");
  if (has_list) {
    const toml::array* arr = t.get("lengths")->as_array();
    if (!arr) throw ConfigError("sweep.lengths must be an array");
    for (const toml::node& n : *arr) {
      double v = 0.0;
      if (auto d = n.value_exact<double>())
        v = *d;
      else if (auto i = n.value_exact<std::int64_t>())
        v = static_cast<double>(*i);
      else
        throw ConfigError("sweep.lengths must contain numbers");
      sweep.lengths.push_back(v);
    }
  } else {
    const toml::node* node = t.get("range");
    if (!node->is_table()) throw ConfigError("sweep.range must be a table {start, stop, step}");
    const toml::table& r = *node->as_table();
    check_keys(r, {"start", "stop", "step"}, "sweep.range");
    const auto start = number(r, "start", "sweep.range");
    const auto stop = number(r, "stop", "sweep.range");
    const auto step = number(r, "step", "sweep.range");
    if (!start || !stop || !step) throw ConfigError("sweep.range needs start, stop and step");
    sweep.range = SweepRange{finite_number(*start, "sweep.range.start"), finite_number(*stop, "sweep.range.stop"),
                             finite_number(*step, "sweep.range.step")};
    if (!(sweep.range->step > 0.0)) throw ConfigError("sweep.range.step must be positive");
    if (sweep.range->stop < sweep.range->start) throw ConfigError("sweep.range.stop is below start");
  }
  const std::vector<double> points = sweep.points();
  if (points.empty()) throw ConfigError("sweep is empty");
  for (double v : points)
    if (!(std::isfinite(v) && v >= 0.0)) throw ConfigError("sweep lengths must be finite and non-negative");
  return sweep;
}

std::string number_literal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string string_literal(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string filter_literal(const FilterSpec& f) {
  switch (f.kind) {
    case FilterSpec::Kind::identity:
      return "{ kind = \"identity\" }";
    case FilterSpec::Kind::parabolic:
      return f.loss ? "{ kind = \"parabolic\", loss = " + number_literal(*f.loss) + " }"
                    : "{ kind = \"parabolic\", eta = " + number_literal(*f.eta) + " }";
    case FilterSpec::Kind::custom:
      return "{ kind = \"custom\", table = " + string_literal(f.table_path) + " }";
  }
  return {};
}

}  // namespace

std::vector<double> SweepSpec::points() const {
  if (!range) return lengths;
  const double span = (range->stop - range->start) / range->step;
  if (!(span >= 0.0) || span > static_cast<double>(kMaxSweepPoints)) throw ConfigError("sweep range has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = range->start + static_cast<double>(i) * range->step;
  return out;
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("output format must be csv or json (got '" + std::string(name) + "')");
}

ExperimentConfig parse_config(std::string_view text_in, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text_in);
  } catch (const toml::parse_error& err) {
    std::ostringstream msg;
    msg << "config parse error at line " << err.source().begin.line << ": " << err.description();
    throw ConfigError(msg.str());
  }
  check_keys(root, {"grid", "propagator", "stages", "sweep", "output", "validate", "cascade"}, "config");

  ExperimentConfig cfg;
  if (const toml::table* g = subtable(root, "grid")) {
    check_keys(*g, {"n_points", "window"}, "[grid]");
    if (const toml::node* n = g->get("n_points")) {
      const auto v = n->value_exact<std::int64_t>();
      if (!v) throw ConfigError("grid.n_points must be an integer");
      if (*v < 8 || (*v & (*v - 1)) != 0) throw ConfigError("grid.n_points must be a power of two >= 8");
      cfg.chain.n_points = static_cast<std::size_t>(*v);
    }
    if (auto w = number(*g, "window", "grid")) {
      if (!(std::isfinite(*w) && *w > 0.0)) throw ConfigError("grid.window must be positive");
      cfg.chain.window = *w;
    }
  }

  if (const toml::table* p = subtable(root, "propagator")) {
    check_keys(*p, {"backend", "step"}, "[propagator]");
    if (auto b = text(*p, "backend", "propagator")) cfg.propagator.backend = backend_from_string(*b);
    if (auto s = number(*p, "step", "propagator")) {
      if (!(std::isfinite(*s) && *s > 0.0)) throw ConfigError("propagator.step must be positive");
      cfg.propagator.rk4_step = *s;
    }
  }

  const toml::node* stages = root.get("stages");
  if (!stages) throw ConfigError("config needs at least one entry in 'stages'");
  const toml::array* arr = stages->as_array();
  if (!arr || arr->empty()) throw ConfigError("'stages' must be a non-empty array of tables");
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string where = "stages[" + std::to_string(i) + "]";
    const toml::table* st = arr->get(i)->as_table();
    if (!st) throw ConfigError(where + " must be a table");
    check_keys(*st, {"length", "filter"}, where);
    StageSpec stage;
    const auto length = number(*st, "length", where);
    if (!length) throw ConfigError(where + ".length is required");
    if (!(std::isfinite(*length) && *length >= 0.0)) throw ConfigError(where + ".length must be non-negative");
    stage.length_soliton_periods = *length;
    const toml::node* f = st->get("filter");
    if (!f || !f->is_table()) throw ConfigError(where + ".filter must be a table");
    stage.filter = parse_filter(*f->as_table(), base_dir, where + ".filter");
    cfg.chain.stages.push_back(std::move(stage));
  }

  if (const toml::table* s = subtable(root, "sweep")) cfg.sweep = parse_sweep(*s, cfg.chain.stages.size());

  if (const toml::table* o = subtable(root, "output")) {
    check_keys(*o, {"path", "format"}, "[output]");
    if (auto path = text(*o, "path", "output")) cfg.output.path = *path;
    if (auto fmt = text(*o, "format", "output")) cfg.output.format = output_format_from_string(*fmt);
  }

  if (const toml::table* v = subtable(root, "validate")) {
    check_keys(*v, {"backend_periods"}, "[validate]");
    if (auto bp = number(*v, "backend_periods", "validate")) {
      if (!(std::isfinite(*bp) && *bp > 0.0)) throw ConfigError("validate.backend_periods must be positive");
      cfg.validate.backend_periods = *bp;
    }
  }

  if (const toml::table* c = subtable(root, "cascade")) {
    check_keys(*c, {"cross_check"}, "[cascade]");
    if (const toml::node* n = c->get("cross_check")) {
      const auto b = n->value_exact<bool>();
      if (!b) throw ConfigError("cascade.cross_check must be a boolean");
      cfg.cross_check = *b;
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string base = std::filesystem::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_config(buf.str(), base);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n"
      << "n_points = " << cfg.chain.n_points << "\n"
      << "window = " << number_literal(cfg.chain.window) << "\n\n"
      << "[propagator]\n"
      << "backend = " << string_literal(std::string(to_string(cfg.propagator.backend))) << "\n"
      << "step = " << number_literal(cfg.propagator.rk4_step) << "\n";
  for (const StageSpec& stage : cfg.chain.stages) {
    out << "\n[[stages]]\n"
        << "length = " << number_literal(stage.length_soliton_periods) << "\n"
        << "filter = " << filter_literal(stage.filter) << "\n";
  }
  if (cfg.sweep) {
    out << "\n[sweep]\n"
        << "stage_index = " << cfg.sweep->stage_index << "\n";
    if (cfg.sweep->range) {
      out << "range = { start = " << number_literal(cfg.sweep->range->start)
          << ", stop = " << number_literal(cfg.sweep->range->stop)
          << ", step = " << number_literal(cfg.sweep->range->step) << " }\n";
    } else {
      out << "lengths = [";
      for (std::size_t i = 0; i < cfg.sweep->lengths.size(); ++i)
        out << (i ? ", " : "") << number_literal(cfg.sweep->lengths[i]);
      out << "]\n";
    }
  }
  out << "\n[output]\n";
  if (!cfg.output.path.empty()) out << "path = " << string_literal(cfg.output.path) << "\n";
  out << "format = " << string_literal(std::string(to_string(cfg.output.format))) << "\n\n"
      << "[validate]\n"
      << "backend_periods = " << number_literal(cfg.validate.backend_periods) << "\n\n"
      << "[cascade]\n"
      << "cross_check = " << (cfg.cross_check ? "true" : "false") << "\n";
  return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig physics = cfg;
  physics.output = OutputSpec{};
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize_config(physics)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ssq
