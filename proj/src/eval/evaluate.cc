// Copyright (c) 2026 The tsx project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eval/evaluate.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "data/example.h"
#include "dsp/metrics.h"
#include "sim/rir.h"
#include "util/error.h"

namespace tsx {
namespace {

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::ofstream OpenOut(const std::string& path, const std::string& stage) {
  std::ofstream out(path);
  TSX_CHECK(out.good(), stage, "cannot open for writing: " << path);
  return out;
}

}  // namespace

std::string StringFingerprint(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvalVariant ParseEvalVariant(const std::string& name) {
  if (name == "spectral_only") return EvalVariant::kSpectralOnly;
  if (name == "spatial_only") return EvalVariant::kSpatialOnly;
  if (name == "proposed") return EvalVariant::kProposed;
  if (name == "proposed_no_3b") return EvalVariant::kProposedNo3b;
  if (name == "proposed_doa_inference") return EvalVariant::kProposedDoaInference;
  throw Error("evaluate", "unknown variant: " + name);
}

std::string EvalVariantName(EvalVariant v) {
  switch (v) {
    case EvalVariant::kSpectralOnly: return "spectral_only";
    case EvalVariant::kSpatialOnly: return "spatial_only";
    case EvalVariant::kProposed: return "proposed";
    case EvalVariant::kProposedNo3b: return "proposed_no_3b";
    case EvalVariant::kProposedDoaInference: return "proposed_doa_inference";
  }
  throw Error("evaluate", "bad variant enum");
}

double EvalReport::MeanSiSdri() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.sisdri);
  return Mean(v);
}

double EvalReport::MedianSiSdri() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.sisdri);
  return Median(v);
}

double EvalReport::MeanUnprocessedSiSdr() const {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.unproc_sisdr);
  return Mean(v);
}

void EvalReport::WriteCsv(const std::string& path) const {
  auto out = OpenOut(path, "evaluate");
  out << "# config=" << config << " variant=" << variant
      << " checkpoint=" << checkpoint_hash << " settings=" << settings_hash
      << " seed=" << seed << (skipped ? " skipped=1" : "") << "\n";
  out << "seed,sisdr,sisdri,unproc_sisdr,class_pred,pairing_applicable,"
         "pairing_correct\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.sisdr << ',' << r.sisdri << ','
        << r.unproc_sisdr << ',' << r.class_pred << ','
        << (r.pairing_applicable ? 1 : 0) << ',' << (r.pairing_correct ? 1 : 0)
        << "\n";
  }
}

void EvalReport::WriteJson(const std::string& path) const {
  nlohmann::json j;
  j["config"] = config;
  j["variant"] = variant;
  j["checkpoint_hash"] = checkpoint_hash;
  j["settings_hash"] = settings_hash;
  j["seed"] = seed;
  j["skipped"] = skipped;
  j["num_examples"] = rows.size();
  j["mean_sisdri_db"] = MeanSiSdri();
  j["median_sisdri_db"] = MedianSiSdri();
  // The mixture itself, dual-labeled: raw SI-SDR of channel 1 and the
  // (identically zero) improvement.
  j["unprocessed"] = {{"mean_sisdr_db", MeanUnprocessedSiSdr()},
                      {"mean_sisdri_db", 0.0}};
  auto jrows = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json jr;
    jr["seed"] = r.seed;
    jr["sisdr_db"] = r.sisdr;
    jr["sisdri_db"] = r.sisdri;
    jr["unproc_sisdr_db"] = r.unproc_sisdr;
    jr["class_pred"] = r.class_pred;
    if (r.pairing_applicable) jr["pairing_correct"] = r.pairing_correct;
    jrows.push_back(std::move(jr));
  }
  j["rows"] = std::move(jrows);
  auto out = OpenOut(path, "evaluate");
  out << j.dump(2) << "\n";
}

EvalReport EvaluateTestset(ExtractorModel& model, DoaNet* doa_model,
                           const std::vector<TestExample>& test_set,
                           TestConfig config, EvalVariant variant,
                           uint64_t seed, const std::string& checkpoint_hash) {
  EvalReport rep;
  rep.config = TestConfigName(config);
  rep.variant = EvalVariantName(variant);
  rep.checkpoint_hash = checkpoint_hash;
  rep.settings_hash = StringFingerprint(model.config().ToJson().dump());
  rep.seed = seed;

  // DOA inference ignores the provided DOA, so the corrupted-DOA condition
  // does not apply to it; the cell is reported as skipped.
  if (variant == EvalVariant::kProposedDoaInference &&
      config == TestConfig::kSgmRdr) {
    rep.skipped = true;
    return rep;
  }
  if (variant == EvalVariant::kProposedDoaInference)
    TSX_CHECK(doa_model != nullptr, "evaluate",
              "proposed_doa_inference needs a DOA estimator checkpoint");

  Rng root(seed ^ 0xe7a1ULL);
  for (size_t i = 0; i < test_set.size(); ++i) {
    const TestExample& ex = test_set[i];
    Rng rng = root.Fork(i);
    EvalRow row;
    row.seed = ex.seed;

    Wave est;
    std::vector<double> probs;
    switch (variant) {
      case EvalVariant::kSpectralOnly:
        est = ExtractSpectralOnly(model, ex.mix.mixture, ex.enroll_desired,
                                  rng.Next());
        break;
      case EvalVariant::kSpatialOnly:
        est = ExtractSpatialOnly(model, ex.mix.mixture, ex.provided_doa_deg,
                                 rng.Next());
        break;
      case EvalVariant::kProposed:
      case EvalVariant::kProposedNo3b:
        est = model.Extract(ex.mix.mixture, ex.enroll_desired,
                            ex.provided_doa_deg, &probs);
        break;
      case EvalVariant::kProposedDoaInference: {
        ExtractAllResult r =
            ExtractAll(model, *doa_model, ex.mix.mixture, ex.enroll_desired,
                       ex.enroll_interferer, rng.Next());
        est = r.out1;
        row.pairing_applicable = true;
        row.pairing_correct =
            std::abs(r.theta_for_ref1 - ex.true_desired_doa_deg) <=
            std::abs(r.theta_for_ref2 - ex.true_desired_doa_deg);
        break;
      }
    }
    if (!probs.empty())
      row.class_pred = static_cast<int>(
          std::max_element(probs.begin(), probs.end()) - probs.begin());

    row.sisdr = SiSdr(est, ex.mix.target_reverb);
    row.unproc_sisdr = SiSdr(ex.mix.mixture.channel(0), ex.mix.target_reverb);
    row.sisdri = row.sisdr - row.unproc_sisdr;
    rep.rows.push_back(row);
  }
  return rep;
}

SweepScene MakeSweepScene(const SpeakerCorpus& corpus, uint64_t seed,
                          double rt60) {
  std::vector<std::string> enrollable;
  for (const auto& [id, s] : corpus.speakers)
    if (s.utterances.size() >= 2) enrollable.push_back(id);
  TSX_CHECK(enrollable.size() >= 2, "sweep",
            "needs two speakers with >= 2 utterances each");

  Rng rng(seed ^ 0x53eebULL);
  const size_t a = rng.UniformInt(0, enrollable.size() - 1);
  size_t b = a;
  while (b == a) b = rng.UniformInt(0, enrollable.size() - 1);
  const auto& spk1 = corpus.speakers.at(enrollable[a]);
  const auto& spk2 = corpus.speakers.at(enrollable[b]);

  RoomScene scene;
  scene.room_dims = Eigen::Vector3d(6.0, 6.0, 3.0);
  scene.rt60 = rt60;
  scene.array.center = Eigen::Vector3d(3.0, 3.0, 1.5);
  scene.array.axis_azimuth_deg = 0.0;
  scene.desired_doa_deg = 54;
  scene.interferer_doa_deg = 122;
  scene.desired_radius = 1.5;
  scene.interferer_radius = 2.0;
  scene.desired_pos = PositionFromDoa(scene.array, 54, 1.5);
  scene.interferer_pos = PositionFromDoa(scene.array, 122, 2.0);
  scene.noise_pos = PositionFromDoa(scene.array, 160, 2.2);
  scene.mix_snr_db = 20.0;
  scene.sir_db = 0.0;
  scene.seed = seed;
  scene.Validate();

  SweepScene out;
  out.mix = MixScene(scene, TileCrop(LoadUtterance8k(spk1.utterances[0])),
                     TileCrop(LoadUtterance8k(spk2.utterances[0])),
                     GaussianNoise(kSegmentSamples, rng.Next()));
  const ImpulseResponseSet d_rir = SimulateRir(scene, SourceTag::kDesired);
  const ImpulseResponseSet i_rir = SimulateRir(scene, SourceTag::kInterferer);
  out.ref1 = RenderSource(TileCrop(LoadUtterance8k(spk1.utterances[1])),
                          kSampleRate, d_rir).channel(0);
  out.ref2 = RenderSource(TileCrop(LoadUtterance8k(spk2.utterances[1])),
                          kSampleRate, i_rir).channel(0);
  out.target1 = out.mix.target_reverb;
  out.target2 = out.mix.interferer_reverb;
  return out;
}

SweepResult SweepTheta(ExtractorModel& model, const SweepScene& scene) {
  SweepResult res;
  const Wave mix_ch1 = scene.mix.mixture.channel(0);
  const double base1 = SiSdr(mix_ch1, scene.target1);
  const double base2 = SiSdr(mix_ch1, scene.target2);
  for (int bin = 0; bin < kDoaGridBins; ++bin) {
    const int theta = BinToDoa(bin);
    std::vector<double> p1, p2;
    const Wave e1 = model.Extract(scene.mix.mixture, scene.ref1, theta, &p1);
    const Wave e2 = model.Extract(scene.mix.mixture, scene.ref2, theta, &p2);
    res.thetas.push_back(theta);
    res.sisdri1.push_back(SiSdr(e1, scene.target1) - base1);
    res.sisdri2.push_back(SiSdr(e2, scene.target2) - base2);
    res.probs1.push_back({p1[0], p1[1], p1[2]});
    res.probs2.push_back({p2[0], p2[1], p2[2]});
  }
  return res;
}

void SweepResult::WriteCsv(const std::string& path) const {
  auto out = OpenOut(path, "sweep");
  out << "theta_deg,sisdri1,sisdri2,p1_both,p1_spatial,p1_spectral,"
         "p2_both,p2_spatial,p2_spectral\n";
  for (size_t i = 0; i < thetas.size(); ++i) {
    out << thetas[i] << ',' << sisdri1[i] << ',' << sisdri2[i] << ','
        << probs1[i][0] << ',' << probs1[i][1] << ',' << probs1[i][2] << ','
        << probs2[i][0] << ',' << probs2[i][1] << ',' << probs2[i][2] << "\n";
  }
}

namespace {

struct PlotFrame {
  double x0, y0, w, h;       // pixel rect
  double xmin, xmax, ymin, ymax;
  double X(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double Y(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void Polyline(std::ostream& out, const PlotFrame& f,
              const std::vector<int>& xs, const std::vector<double>& ys,
              const char* color, const char* dash) {
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\"";
  if (dash) out << " stroke-dasharray=\"" << dash << "\"";
  out << " points=\"";
  for (size_t i = 0; i < xs.size(); ++i)
    out << f.X(xs[i]) << ',' << f.Y(ys[i]) << ' ';
  out << "\"/>\n";
}

void Axes(std::ostream& out, const PlotFrame& f, const std::string& ylabel) {
  out << "<rect x=\"" << f.x0 << "\" y=\"" << f.y0 << "\" width=\"" << f.w
      << "\" height=\"" << f.h
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 180; t += 30) {
    out << "<text x=\"" << f.X(t) << "\" y=\"" << f.y0 + f.h + 14
        << "\" font-size=\"10\" text-anchor=\"middle\">" << t << "</text>\n";
    out << "<line x1=\"" << f.X(t) << "\" y1=\"" << f.y0 + f.h << "\" x2=\""
        << f.X(t) << "\" y2=\"" << f.y0 + f.h + 4
        << "\" stroke=\"#444\"/>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = f.ymin + (f.ymax - f.ymin) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", y);
    out << "<text x=\"" << f.x0 - 6 << "\" y=\"" << f.Y(y) + 3
        << "\" font-size=\"10\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << f.x0 - 34 << "\" y=\"" << f.y0 + f.h / 2
      << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
      << f.x0 - 34 << ' ' << f.y0 + f.h / 2 << ")\">" << ylabel
      << "</text>\n";
}

}  // namespace

void WriteSweepSvg(const std::string& path, const SweepResult& result,
                   const std::string& title) {
  TSX_CHECK(!result.thetas.empty(), "sweep", "empty sweep result");
  auto out = OpenOut(path, "sweep");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
         "height=\"520\" viewBox=\"0 0 720 520\">\n";
  out << "<text x=\"360\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">"
      << title << "</text>\n";

  double lo = result.sisdri1[0], hi = result.sisdri1[0];
  for (size_t i = 0; i < result.thetas.size(); ++i) {
    lo = std::min({lo, result.sisdri1[i], result.sisdri2[i]});
    hi = std::max({hi, result.sisdri1[i], result.sisdri2[i]});
  }
  if (hi - lo < 1.0) { hi += 0.5; lo -= 0.5; }

  PlotFrame top{60, 36, 620, 200, 0, 180, lo, hi};
  Axes(out, top, "SI-SDRi (dB)");
  Polyline(out, top, result.thetas, result.sisdri1, "#1f77b4", nullptr);
  Polyline(out, top, result.thetas, result.sisdri2, "#2ca02c", "4,3");
  out << "<text x=\"70\" y=\"48\" font-size=\"10\" fill=\"#1f77b4\">speaker 1"
         "</text>\n<text x=\"70\" y=\"60\" font-size=\"10\" fill=\"#2ca02c\">"
         "speaker 2</text>\n";

  PlotFrame bot{60, 290, 620, 180, 0, 180, 0, 1};
  Axes(out, bot, "class prob (spk 1)");
  std::vector<double> c0, c1, c2;
  for (const auto& p : result.probs1) {
    c0.push_back(p[0]);
    c1.push_back(p[1]);
    c2.push_back(p[2]);
  }
  Polyline(out, bot, result.thetas, c0, "#1f77b4", nullptr);
  Polyline(out, bot, result.thetas, c1, "#d62728", nullptr);
  Polyline(out, bot, result.thetas, c2, "#9467bd", nullptr);
  out << "<text x=\"70\" y=\"302\" font-size=\"10\" fill=\"#1f77b4\">both"
         "</text>\n<text x=\"70\" y=\"314\" font-size=\"10\" fill=\"#d62728\">"
         "spatial-only</text>\n<text x=\"70\" y=\"326\" font-size=\"10\" "
         "fill=\"#9467bd\">spectral-only</text>\n";
  out << "<text x=\"360\" y=\"505\" font-size=\"11\" text-anchor=\"middle\">"
         "enrollment DOA (degrees)</text>\n";
  out << "</svg>\n";
}

}  // namespace tsx
