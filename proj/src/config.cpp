#include "ksrobin/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace ksr {

const ConfigEntry* ConfigDocument::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void ConfigDocument::set(const std::string& key, std::string value, int line) {
  if (auto* prev = find(key)) {
    throw ValidationError(source_ + ":" + std::to_string(line) + ": duplicate key '" + key +
                          "' (first set on line " + std::to_string(prev->line) + ")");
  }
  entries_[key] = {std::move(value), line};
}

void ConfigDocument::fail(const std::string& key, const std::string& message) const {
  const auto* e = find(key);
  std::string where = source_;
  if (e && e->line > 0) where += ":" + std::to_string(e->line);
  throw ValidationError(where + ": " + key + ": " + message);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return k.find("..") == std::string_view::npos;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    if (item.empty()) throw ValidationError("empty list element");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

} // namespace

ConfigDocument parse_config(std::string_view text, std::string source) {
  ConfigDocument doc(std::move(source));
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = doc.source() + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError(where + "expected 'key = value', got '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ValidationError(where + "invalid key '" + std::string(key) + "'");
    if (value.empty()) throw ValidationError(where + "missing value for '" + std::string(key) + "'");
    doc.set(std::string(key), std::string(value), line_no);
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ComputeError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ComputeError("error reading config file '" + path + "'");
  return parse_config(ss.str(), path);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x))
    throw ValidationError("expected a finite number, got '" + std::string(text) + "'");
  return x;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item));
  return out;
}

namespace {

long long parse_integer(std::string_view text) {
  text = trim(text);
  long long x = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end)
    throw ValidationError("expected an integer, got '" + std::string(text) + "'");
  return x;
}

std::size_t parse_count(std::string_view text) {
  const auto x = parse_integer(text);
  if (x <= 0) throw ValidationError("expected a positive integer, got '" + std::string(text) + "'");
  return static_cast<std::size_t>(x);
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError("expected true or false, got '" + std::string(text) + "'");
}

Profile parse_profile(std::string_view text) {
  text = trim(text);
  if (text == "gaussian") return Profile::Gaussian;
  if (text == "constant") return Profile::Constant;
  throw ValidationError("unknown profile '" + std::string(text) + "' (gaussian, constant)");
}

const char* profile_name(Profile p) { return p == Profile::Gaussian ? "gaussian" : "constant"; }

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  /// std::nullopt when the field is unset and therefore not echoed.
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

FieldProfile& v_profile(RunConfig& c, const std::string& key) {
  if (!c.initial.v)
    throw ValidationError(key + " requires initial.v.profile to be gaussian or constant");
  return *c.initial.v;
}

#define KSR_DOUBLE_FIELD(name, member)                                                          \
  Field {                                                                                       \
    name, [](RunConfig& c, const std::string& s) { c.member = parse_double(s); },               \
        [](const RunConfig& c) -> std::optional<std::string> { return format_double(c.member); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      KSR_DOUBLE_FIELD("params.chi", params.chi),
      KSR_DOUBLE_FIELD("params.h", params.h),
      KSR_DOUBLE_FIELD("params.alpha", params.alpha),
      {"params.tau",
       [](RunConfig& c, const std::string& s) {
         const auto t = parse_integer(s);
         if (t != 0 && t != 1) throw ValidationError("tau must be 0 or 1");
         c.params.tau = static_cast<int>(t);
       },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.params.tau); }},
      KSR_DOUBLE_FIELD("source.a", source.a),
      KSR_DOUBLE_FIELD("source.b", source.b),
      KSR_DOUBLE_FIELD("source.c", source.c),
      {"domain.n",
       [](RunConfig& c, const std::string& s) {
         const auto n = parse_integer(s);
         if (n < 1 || n > 64) throw ValidationError("dimension must be in [1, 64]");
         c.domain.n = static_cast<int>(n);
       },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.domain.n); }},
      KSR_DOUBLE_FIELD("domain.radius", domain.radius),
      {"grid.cells", [](RunConfig& c, const std::string& s) { c.cells = parse_count(s); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.cells); }},
      KSR_DOUBLE_FIELD("time.t_end", t_end),
      KSR_DOUBLE_FIELD("time.dt_init", dt_init),
      KSR_DOUBLE_FIELD("time.dt_min", dt_min),
      KSR_DOUBLE_FIELD("time.dt_max", dt_max),
      KSR_DOUBLE_FIELD("time.sample_interval", sample_interval),
      KSR_DOUBLE_FIELD("control.cfl_target", cfl_target),
      KSR_DOUBLE_FIELD("control.growth_cap", growth_cap),
      KSR_DOUBLE_FIELD("control.u_max_threshold", u_max_threshold),
      {"control.max_steps", [](RunConfig& c, const std::string& s) { c.max_steps = parse_count(s); },
       [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.max_steps); }},
      {"initial.u.profile",
       [](RunConfig& c, const std::string& s) { c.initial.u.kind = parse_profile(s); },
       [](const RunConfig& c) -> std::optional<std::string> { return profile_name(c.initial.u.kind); }},
      KSR_DOUBLE_FIELD("initial.u.amplitude", initial.u.amplitude),
      KSR_DOUBLE_FIELD("initial.u.width", initial.u.width),
      {"initial.u.mass",
       [](RunConfig& c, const std::string& s) { c.initial.u.mass = parse_double(s); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.initial.u.mass) return std::nullopt;
         return format_double(*c.initial.u.mass);
       }},
      {"initial.v.profile",
       [](RunConfig& c, const std::string& s) {
         if (trim(s) == "same") {
           c.initial.v.reset();
           return;
         }
         if (!c.initial.v) c.initial.v.emplace();
         c.initial.v->kind = parse_profile(s);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         return c.initial.v ? profile_name(c.initial.v->kind) : "same";
       }},
      {"initial.v.amplitude",
       [](RunConfig& c, const std::string& s) {
         v_profile(c, "initial.v.amplitude").amplitude = parse_double(s);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.initial.v) return std::nullopt;
         return format_double(c.initial.v->amplitude);
       }},
      {"initial.v.width",
       [](RunConfig& c, const std::string& s) {
         v_profile(c, "initial.v.width").width = parse_double(s);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.initial.v) return std::nullopt;
         return format_double(c.initial.v->width);
       }},
      {"initial.v.mass",
       [](RunConfig& c, const std::string& s) {
         v_profile(c, "initial.v.mass").mass = parse_double(s);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.initial.v || !c.initial.v->mass) return std::nullopt;
         return format_double(*c.initial.v->mass);
       }},
      {"diagnostics.weighted_m",
       [](RunConfig& c, const std::string& s) { c.weighted_m = parse_double(s); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.weighted_m) return std::nullopt;
         return format_double(*c.weighted_m);
       }},
      {"diagnostics.weighted_mu",
       [](RunConfig& c, const std::string& s) { c.weighted_mu = parse_double(s); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.weighted_mu) return std::nullopt;
         return format_double(*c.weighted_mu);
       }},
      {"output.snapshot_times",
       [](RunConfig& c, const std::string& s) {
         if (trim(s) == "none") {
           c.snapshot_times.clear();
           return;
         }
         auto ts = parse_double_list(s);
         std::sort(ts.begin(), ts.end());
         ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
         c.snapshot_times = std::move(ts);
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         return c.snapshot_times.empty() ? "none" : format_list(c.snapshot_times);
       }},
  };
  return table;
}

#undef KSR_DOUBLE_FIELD

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

const std::set<std::string> output_keys = {"output.dir", "output.snapshot_resolution"};

void check_keys(const ConfigDocument& doc, const std::function<bool(const std::string&)>& extra) {
  for (const auto& [key, entry] : doc.entries()) {
    if (is_run_key(key) || output_keys.count(key) || extra(key)) continue;
    doc.fail(key, "unknown key");
  }
}

std::string canonical_extras(const ConfigDocument& doc, const std::vector<std::string>& prefixes) {
  std::string out;
  for (const auto& [key, entry] : doc.entries()) {
    for (const auto& p : prefixes) {
      if (key.rfind(p, 0) == 0) {
        out += key + " = " + entry.value + "\n";
        break;
      }
    }
  }
  return out;
}

} // namespace

bool is_run_key(std::string_view key) { return find_field(key) != nullptr; }

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void apply_run_key(RunConfig& config, const std::string& key, const std::string& value) {
  const auto* f = find_field(key);
  if (!f) throw ValidationError("unknown key '" + key + "'");
  f->set(config, value);
}

RunConfig to_run_config(const ConfigDocument& doc) {
  RunConfig c;
  // table order, so profile selectors precede their parameters
  for (const auto& f : fields()) {
    const auto* e = doc.find(f.key);
    if (!e) continue;
    try {
      f.set(c, e->value);
    } catch (const ValidationError& ex) {
      doc.fail(f.key, ex.what());
    }
  }
  return c;
}

std::string echo_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    if (auto v = f.get(config)) out += f.key + " = " + *v + "\n";
  }
  return out;
}

std::string content_hash(std::string_view canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

OutputSpec to_output_spec(const ConfigDocument& doc) {
  OutputSpec o;
  if (const auto* e = doc.find("output.dir")) o.dir = e->value;
  if (const auto* e = doc.find("output.snapshot_resolution")) {
    try {
      o.snapshot_resolution = parse_count(e->value);
    } catch (const ValidationError& ex) {
      doc.fail("output.snapshot_resolution", ex.what());
    }
    if (o.snapshot_resolution > 8192) doc.fail("output.snapshot_resolution", "at most 8192");
  }
  return o;
}

namespace {

void validate_in(const ConfigDocument& doc, const RunConfig& c, const std::string& what) {
  try {
    c.validate();
  } catch (const ValidationError& ex) {
    throw ValidationError(doc.source() + ": " + what + ex.what());
  }
}

} // namespace

RunSpec to_run_spec(const ConfigDocument& doc) {
  check_keys(doc, [](const std::string&) { return false; });
  RunSpec s;
  s.config = to_run_config(doc);
  s.output = to_output_spec(doc);
  validate_in(doc, s.config, "");
  s.canonical = echo_run_config(s.config) + "output.snapshot_resolution = " +
                std::to_string(s.output.snapshot_resolution) + "\n";
  return s;
}

CompareSpec to_compare_spec(const ConfigDocument& doc) {
  check_keys(doc, [](const std::string& k) {
    return k == "compare.variants" || k.rfind("variant.", 0) == 0;
  });
  CompareSpec s;
  s.base = to_run_config(doc);
  s.output = to_output_spec(doc);

  const auto* list = doc.find("compare.variants");
  if (!list) throw ValidationError(doc.source() + ": compare.variants: variant list is required");
  std::vector<std::string> names;
  try {
    names = split_list(list->value);
  } catch (const ValidationError& ex) {
    doc.fail("compare.variants", ex.what());
  }
  if (names.empty()) doc.fail("compare.variants", "variant list is empty");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!valid_key(n) || n.find('.') != std::string::npos)
      doc.fail("compare.variants", "invalid variant name '" + n + "'");
    if (!seen.insert(n).second) doc.fail("compare.variants", "duplicate variant '" + n + "'");
  }

  // every variant.<name>.<key> must name a listed variant and a run key
  for (const auto& [key, entry] : doc.entries()) {
    if (key.rfind("variant.", 0) != 0) continue;
    const auto rest = key.substr(8);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) doc.fail(key, "expected variant.<name>.<key>");
    const auto name = rest.substr(0, dot);
    const auto sub = rest.substr(dot + 1);
    if (!seen.count(name)) doc.fail(key, "variant '" + name + "' is not listed in compare.variants");
    if (!is_run_key(sub)) doc.fail(key, "unknown key '" + sub + "'");
    if (sub == "grid.cells" || sub.rfind("time.", 0) == 0 || sub.rfind("control.", 0) == 0 ||
        sub.rfind("domain.", 0) == 0)
      doc.fail(key, "variants share grid and step settings; '" + sub + "' cannot be overridden");
  }

  for (const auto& n : names) {
    ConfigDocument merged(doc.source());
    for (const auto& [key, entry] : doc.entries())
      if (is_run_key(key)) merged.set(key, entry.value, entry.line);
    const auto prefix = "variant." + n + ".";
    for (const auto& [key, entry] : doc.entries()) {
      if (key.rfind(prefix, 0) != 0) continue;
      merged.assign(key.substr(prefix.size()), entry);
    }
    auto cfg = to_run_config(merged);
    validate_in(doc, cfg, "variant " + n + ": ");
    s.variants.emplace_back(n, std::move(cfg));
  }

  s.canonical = echo_run_config(s.base) + "output.snapshot_resolution = " +
                std::to_string(s.output.snapshot_resolution) + "\n" +
                canonical_extras(doc, {"compare.", "variant."});
  return s;
}

SweepSpec to_sweep_spec(const ConfigDocument& doc) {
  check_keys(doc, [](const std::string& k) { return k.rfind("sweep.", 0) == 0; });
  SweepSpec s;
  s.base = to_run_config(doc);
  s.output = to_output_spec(doc);

  for (const auto& [key, entry] : doc.entries()) {
    if (key.rfind("sweep.", 0) != 0) continue;
    const auto sub = key.substr(6);
    try {
      if (sub == "classify_only") {
        s.classify_only = parse_bool(entry.value);
      } else if (sub == "trace_c") {
        s.trace_c = parse_double(entry.value);
        if (!(*s.trace_c > 0.0)) throw ValidationError("trace constant must be positive");
      } else if (is_run_key(sub)) {
        auto values = split_list(entry.value);
        // check each value parses for this key
        for (const auto& v : values) {
          RunConfig probe = s.base;
          apply_run_key(probe, sub, v);
        }
        s.axes.push_back({sub, std::move(values)});
      } else {
        throw ValidationError("unknown sweep key");
      }
    } catch (const ValidationError& ex) {
      doc.fail(key, ex.what());
    }
  }
  if (s.axes.empty()) throw ValidationError(doc.source() + ": sweep needs at least one sweep.<key> axis");
  std::sort(s.axes.begin(), s.axes.end(),
            [](const SweepAxis& a, const SweepAxis& b) { return a.key < b.key; });

  s.canonical = echo_run_config(s.base) + "output.snapshot_resolution = " +
                std::to_string(s.output.snapshot_resolution) + "\n" +
                canonical_extras(doc, {"sweep."});
  return s;
}

} // namespace ksr
