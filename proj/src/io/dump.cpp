#include "shelab/io/dump.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "shelab/errors.hpp"
#include "shelab/io/serialize.hpp"

namespace shelab::io {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

namespace {

constexpr const char* kColumns[] = {"t", "l1", "linf", "min", "integral", "clamp_events"};

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  std::filesystem::path p = stem;
  p += ext;
  return p;
}

void write_block(std::ofstream& out, const std::vector<double>& xs) {
  out.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

std::optional<double> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from(j);
}

diagnostics::Outcome outcome_from(const std::string& s) {
  using diagnostics::Outcome;
  for (Outcome o : {Outcome::survived, Outcome::exploded, Outcome::min_hit, Outcome::inconclusive})
    if (diagnostics::to_string(o) == s) return o;
  throw ConfigError("unknown outcome '" + s + "'");
}

spde::ExtraDrift extra_from(const std::string& s) {
  using spde::ExtraDrift;
  for (ExtraDrift e : {ExtraDrift::none, ExtraDrift::positivity, ExtraDrift::negated_reflection})
    if (spde::to_string(e) == s) return e;
  throw ConfigError("unknown extra drift '" + s + "'");
}

}  // namespace

std::vector<std::filesystem::path> write_trajectory(const std::filesystem::path& stem, const spde::Trajectory& tr) {
  const auto bin = with_ext(stem, ".bin");
  const auto side = with_ext(stem, ".json");
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());

  const std::size_t n = tr.rows.size();
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + bin.string());
  Json cols = Json::array();
  std::uint64_t offset = 0;
  for (int c = 0; c < 6; ++c) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& r = tr.rows[k];
      const double vals[] = {r.t, r.l1, r.linf, r.min, r.integral, static_cast<double>(r.clamp_events)};
      col[k] = vals[c];
    }
    write_block(out, col);
    cols.push_back({{"name", kColumns[c]}, {"offset", offset}, {"count", n}});
    offset += n * sizeof(double);
  }
  const std::size_t nx = tr.snapshots.empty() ? 0 : tr.snapshots.front().size();
  std::vector<double> snap_t;
  for (const auto& s : tr.snapshots) snap_t.push_back(s.t());
  write_block(out, snap_t);
  const std::uint64_t snap_offset = offset;
  offset += snap_t.size() * sizeof(double);
  for (const auto& s : tr.snapshots) write_block(out, std::vector<double>(s.values().begin(), s.values().end()));
  out.close();
  if (!out) throw ResourceError("failed writing " + bin.string());

  Json j;
  j["format"] = "shelab-trajectory";
  j["format_version"] = 1;
  j["binary"] = bin.filename().string();
  j["header"] = to_json(tr.header);
  j["rows"] = n;
  j["columns"] = cols;
  j["snapshots"] = {{"count", tr.snapshots.size()},
                    {"nx", nx},
                    {"stride", tr.snapshot_stride},
                    {"times_offset", snap_offset},
                    {"values_offset", offset}};
  j["overflow"] = tr.overflow ? Json{{"cell", tr.overflow->cell}, {"t", number(tr.overflow->t)}} : Json(nullptr);
  j["stopping"] = to_json(tr.stopping);
  j["steps"] = tr.steps;
  j["t_end"] = number(tr.t_end);
  j["clamp_events"] = tr.clamp_events;
  std::ofstream js(side);
  if (!js) throw ResourceError("cannot write " + side.string());
  js << j.dump(2) << '\n';
  if (!js) throw ResourceError("failed writing " + side.string());
  return {bin, side};
}

spde::Trajectory read_trajectory(const std::filesystem::path& stem) {
  const auto side = with_ext(stem, ".json");
  std::ifstream js(side);
  if (!js) throw ResourceError("cannot open " + side.string());
  Json j;
  try {
    j = Json::parse(js);
  } catch (const std::exception& e) {
    throw ConfigError(side.string() + ": " + e.what());
  }
  const auto bin = side.parent_path() / j.at("binary").get<std::string>();
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + bin.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto read = [&](std::uint64_t off, std::size_t count) {
    if (off + count * sizeof(double) > bytes.size()) throw ConfigError(bin.string() + ": truncated dump");
    std::vector<double> out(count);
    std::memcpy(out.data(), bytes.data() + off, count * sizeof(double));
    return out;
  };

  spde::Trajectory tr;
  const Json& h = j.at("header");
  tr.header.role = h.at("role").get<std::string>();
  tr.header.config = solver_config_from_json(h.at("config"));
  tr.header.master_seed = h.at("master_seed").get<std::uint64_t>();
  tr.header.path_id = h.at("path_id").get<std::uint32_t>();
  tr.header.refine_level = h.at("refine_level").get<int>();
  tr.header.extra = extra_from(h.at("extra").get<std::string>());
  if (!h.at("b").is_null()) tr.header.b_spec = model_spec_from_json(h.at("b"));
  if (!h.at("sigma").is_null()) tr.header.sigma_spec = model_spec_from_json(h.at("sigma"));
  for (const auto& x : h.at("u0")) tr.header.u0.push_back(number_from(x));
  tr.header.config_hash = h.at("config_hash").get<std::string>();

  const auto n = j.at("rows").get<std::size_t>();
  std::vector<std::vector<double>> cols;
  for (const auto& c : j.at("columns")) cols.push_back(read(c.at("offset").get<std::uint64_t>(), n));
  if (cols.size() != 6) throw ConfigError(side.string() + ": expected 6 columns");
  for (std::size_t k = 0; k < n; ++k)
    tr.rows.push_back({cols[0][k], cols[1][k], cols[2][k], cols[3][k], cols[4][k], static_cast<int>(cols[5][k])});

  const Json& sn = j.at("snapshots");
  const auto count = sn.at("count").get<std::size_t>();
  const auto nx = sn.at("nx").get<std::size_t>();
  tr.snapshot_stride = sn.at("stride").get<int>();
  if (count > 0) {
    const auto times = read(sn.at("times_offset").get<std::uint64_t>(), count);
    const auto values = read(sn.at("values_offset").get<std::uint64_t>(), count * nx);
    const spde::Grid1D grid(static_cast<int>(nx));
    for (std::size_t s = 0; s < count; ++s)
      tr.snapshots.emplace_back(times[s],
                                std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(s * nx),
                                                    values.begin() + static_cast<std::ptrdiff_t>((s + 1) * nx)),
                                grid);
  }
  if (!j.at("overflow").is_null())
    tr.overflow = spde::Overflow{j["overflow"].at("cell").get<int>(), number_from(j["overflow"].at("t"))};

  const Json& st = j.at("stopping");
  auto& rec = tr.stopping;
  rec.tau_inf_eps = optional_from(st.at("tau_inf_eps"));
  rec.tau_l1_M = optional_from(st.at("tau_l1_M"));
  for (const auto& e : st.at("tau_infty_hits")) rec.tau_infty_hits[number_from(e[0])] = number_from(e[1]);
  for (const auto& e : st.at("rho_sequence"))
    rec.rho_sequence.push_back({number_from(e[0]), e[1].get<int>(),
                                e[2].get<std::string>() == "triple" ? diagnostics::Direction::triple
                                                                    : diagnostics::Direction::third});
  const Json& c = st.at("classification");
  rec.classification = {outcome_from(c.at("outcome").get<std::string>()), number_from(c.at("time")),
                        c.at("overflow").get<bool>()};
  rec.halted = st.at("halted").get<bool>();
  tr.steps = j.at("steps").get<std::uint64_t>();
  tr.t_end = number_from(j.at("t_end"));
  tr.clamp_events = j.at("clamp_events").get<int>();
  return tr;
}

}  // namespace shelab::io
