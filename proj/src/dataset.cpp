#include "krylovlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "krylovlab/errors.hpp"
#include "krylovlab/kcx.hpp"

namespace krylovlab {

std::string target_kind_name(TargetKind k) {
  return k == TargetKind::ComplexityOverN ? "complexity_over_N" : "time_over_N";
}

TargetKind target_kind_from_name(const std::string& name) {
  if (name == "complexity_over_N" || name == "complexity") return TargetKind::ComplexityOverN;
  if (name == "time_over_N" || name == "time") return TargetKind::TimeOverN;
  throw std::invalid_argument("unknown target kind '" + name + "'");
}

std::uint32_t Dataset::record_sample(std::size_t r) const {
  const std::size_t per_sample = betas.size() * static_cast<std::size_t>(t);
  return sample_ids[r / per_sample];
}

int Dataset::record_beta_index(std::size_t r) const {
  const std::size_t per_sample = betas.size() * static_cast<std::size_t>(t);
  return static_cast<int>((r % per_sample) / static_cast<std::size_t>(t));
}

int Dataset::record_time(std::size_t r) const {
  return static_cast<int>(r % static_cast<std::size_t>(t));
}

Split Dataset::record_split(std::size_t r) const {
  const std::size_t per_sample = betas.size() * static_cast<std::size_t>(t);
  return split_of[r / per_sample];
}

std::vector<std::size_t> Dataset::split_indices(Split s) const {
  std::vector<std::size_t> idx;
  const std::size_t per_sample = betas.size() * static_cast<std::size_t>(t);
  for (std::size_t k = 0; k < sample_ids.size(); ++k)
    if (split_of[k] == s)
      for (std::size_t r = k * per_sample; r < (k + 1) * per_sample; ++r) idx.push_back(r);
  return idx;
}

Dataset build_dataset(const std::vector<StateTrajectory>& trajectories,
                      const std::vector<ComplexityCurve>& curves, TargetKind target_kind) {
  if (trajectories.empty()) throw std::invalid_argument("build_dataset: no trajectories");
  if (trajectories.size() != curves.size())
    throw std::invalid_argument("build_dataset: trajectory/curve count mismatch");

  Dataset ds;
  ds.n = static_cast<int>(trajectories.front().psi_t.rows());
  ds.t = static_cast<int>(trajectories.front().times.size());
  ds.basis = trajectories.front().basis;
  ds.target_kind = target_kind;

  // collect unique sample ids and betas in first-seen order
  for (const auto& tr : trajectories) {
    if (tr.times != trajectories.front().times)
      throw std::invalid_argument("build_dataset: time grid mismatch across trajectories");
    if (std::find(ds.sample_ids.begin(), ds.sample_ids.end(),
                  static_cast<std::uint32_t>(tr.sample_id)) == ds.sample_ids.end())
      ds.sample_ids.push_back(static_cast<std::uint32_t>(tr.sample_id));
    if (std::find(ds.betas.begin(), ds.betas.end(), tr.beta) == ds.betas.end())
      ds.betas.push_back(tr.beta);
  }
  std::sort(ds.sample_ids.begin(), ds.sample_ids.end());
  std::sort(ds.betas.begin(), ds.betas.end());
  if (trajectories.size() != ds.sample_ids.size() * ds.betas.size())
    throw std::invalid_argument("build_dataset: trajectories do not cover samples x betas");
  ds.split_of.assign(ds.sample_ids.size(), Split::Train);

  const std::size_t nrec = trajectories.size() * static_cast<std::size_t>(ds.t);
  const std::size_t flen = ds.feature_len();
  ds.features.resize(nrec * flen);
  ds.targets.resize(nrec);

  // index trajectories by (sample, beta)
  auto order_key = [&](const StateTrajectory& tr) {
    const auto si = std::find(ds.sample_ids.begin(), ds.sample_ids.end(),
                              static_cast<std::uint32_t>(tr.sample_id)) -
                    ds.sample_ids.begin();
    const auto bi = std::find(ds.betas.begin(), ds.betas.end(), tr.beta) - ds.betas.begin();
    return static_cast<std::size_t>(si) * ds.betas.size() + static_cast<std::size_t>(bi);
  };

  std::vector<const StateTrajectory*> ordered(trajectories.size(), nullptr);
  std::vector<const ComplexityCurve*> ordered_curves(trajectories.size(), nullptr);
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const std::size_t k = order_key(trajectories[i]);
    if (ordered[k]) throw std::invalid_argument("build_dataset: duplicate (sample, beta) pair");
    ordered[k] = &trajectories[i];
    ordered_curves[k] = &curves[i];
  }

  const int n = ds.n;
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& tr = *ordered[k];
    const auto& curve = *ordered_curves[k];
    if (curve.times != tr.times)
      throw std::invalid_argument("build_dataset: curve grid does not match trajectory grid");
    for (int ti = 0; ti < ds.t; ++ti) {
      const std::size_t r = k * static_cast<std::size_t>(ds.t) + ti;
      float* f = ds.features.data() + r * flen;
      for (int i = 0; i < n; ++i) {
        const auto zt = tr.psi_t(i, ti);
        const auto z0 = tr.psi0[i];
        f[i] = static_cast<float>(zt.real());
        f[n + i] = static_cast<float>(zt.imag());
        f[2 * n + i] = static_cast<float>(z0.real());
        f[3 * n + i] = static_cast<float>(z0.imag());
      }
      const double target = target_kind == TargetKind::ComplexityOverN
                                ? curve.values[ti] / curve.normalization
                                : tr.times[ti] / n;
      ds.targets[r] = static_cast<float>(target);
    }
  }
  return ds;
}

void split_by_sample(Dataset& dataset, const std::array<double, 3>& ratios, Rng& rng) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split_by_sample: ratios must sum to 1");
  const std::size_t m = dataset.sample_ids.size();
  std::size_t counts[3];
  for (int i = 0; i < 3; ++i) counts[i] = static_cast<std::size_t>(ratios[i] * m);
  counts[0] += m - (counts[0] + counts[1] + counts[2]);  // remainder to train
  if (counts[0] == 0 || counts[1] == 0 || counts[2] == 0)
    throw std::invalid_argument("split_by_sample: every split needs at least one sample");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (std::size_t k = 0; k < m; ++k) {
    Split s = k < counts[0]                ? Split::Train
              : k < counts[0] + counts[1] ? Split::Val
                                          : Split::Test;
    dataset.split_of[order[k]] = s;
  }
}

namespace {

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + s + "'");
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds) {
  nlohmann::json header = {
      {"kind", "dataset"},
      {"n", ds.n},
      {"m", ds.sample_ids.size()},
      {"t", ds.t},
      {"betas", ds.betas},
      {"basis", basis_name(ds.basis)},
      {"target_kind", target_kind_name(ds.target_kind)},
      {"seed", ds.seed},
      {"samples", ds.sample_ids},
      {"record_count", ds.record_count()},
  };
  std::vector<std::string> split_names;
  split_names.reserve(ds.split_of.size());
  for (Split s : ds.split_of) split_names.emplace_back(split_name(s));
  header["split"] = split_names;

  std::vector<kcx::Section> sections;
  if (ds.record_count() > 0) {
    header["sections"] = {"RECORDS"};
    kcx::Section sec;
    sec.tag = "RECORDS";
    const std::size_t flen = ds.feature_len();
    sec.payload.resize(ds.record_count() * (flen + 1) * sizeof(float));
    std::uint8_t* p = sec.payload.data();
    for (std::size_t r = 0; r < ds.record_count(); ++r) {
      std::memcpy(p, ds.features.data() + r * flen, flen * sizeof(float));
      p += flen * sizeof(float);
      std::memcpy(p, &ds.targets[r], sizeof(float));
      p += sizeof(float);
    }
    sections.push_back(std::move(sec));
  } else {
    header["sections"] = nlohmann::json::array();
  }
  kcx::write_container(path, header.dump(), sections);
}

Dataset read_dataset(const std::string& path) {
  kcx::ReadResult rr = kcx::read_container(path);
  const auto header = nlohmann::json::parse(rr.header_json);
  if (header.value("kind", "") != "dataset")
    throw FormatError("'" + path + "' is not a dataset container", 0);

  Dataset ds;
  ds.n = header.at("n").get<int>();
  ds.t = header.at("t").get<int>();
  ds.betas = header.at("betas").get<std::vector<double>>();
  ds.basis = basis_from_name(header.at("basis").get<std::string>());
  ds.target_kind = target_kind_from_name(header.at("target_kind").get<std::string>());
  ds.seed = header.at("seed").get<std::uint64_t>();
  ds.sample_ids = header.at("samples").get<std::vector<std::uint32_t>>();
  for (const auto& s : header.at("split").get<std::vector<std::string>>())
    ds.split_of.push_back(split_from_name(s));
  if (ds.split_of.size() != ds.sample_ids.size())
    throw FormatError("split/sample list length mismatch", 0);

  const auto nrec = header.at("record_count").get<std::size_t>();
  if (nrec == 0) return ds;

  const kcx::Section* sec = nullptr;
  for (const auto& s : rr.sections)
    if (s.tag == "RECORDS") sec = &s;
  if (!sec) throw FormatError("missing RECORDS section", 0);
  const std::size_t flen = ds.feature_len();
  const std::size_t want = nrec * (flen + 1) * sizeof(float);
  if (sec->payload.size() != want) throw FormatError("RECORDS payload size mismatch", want);

  ds.features.resize(nrec * flen);
  ds.targets.resize(nrec);
  const std::uint8_t* p = sec->payload.data();
  for (std::size_t r = 0; r < nrec; ++r) {
    std::memcpy(ds.features.data() + r * flen, p, flen * sizeof(float));
    p += flen * sizeof(float);
    std::memcpy(&ds.targets[r], p, sizeof(float));
    p += sizeof(float);
  }
  return ds;
}

void write_targets_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
  out << "sample_id,beta,t,target\n";
  for (std::size_t r = 0; r < ds.record_count(); ++r)
    out << ds.record_sample(r) << ',' << ds.betas[ds.record_beta_index(r)] << ','
        << ds.record_time(r) << ',' << ds.targets[r] << '\n';
}

}  // namespace krylovlab
