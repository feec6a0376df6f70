/* Copyright 2026 The PAL Refine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "pal/backends.h"
#include "pal/commands.h"
#include "pal/errors.h"
#include "pal/eval.h"
#include "pal/image.h"
#include "pal/mask.h"
#include "pal/par.h"
#include "pal/zoom_refine.h"

namespace py = pybind11;

namespace pal {
namespace {

using MaskArray = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;
using ImageArray = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

BinaryMask ToMask(const MaskArray& a) {
  if (a.ndim() != 2) throw InvalidInputError("mask must be a 2-D array");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  std::vector<uint8_t> bits(a.data(), a.data() + a.size());
  for (auto& b : bits) b = b ? 1 : 0;
  return BinaryMask(w, h, std::move(bits));
}

py::array_t<bool> FromMask(const BinaryMask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  const auto bits = m.bits();
  for (size_t i = 0; i < bits.size(); ++i) dst[i] = bits[i] != 0;
  return out;
}

RgbImage ToImage(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw InvalidInputError("image must be an (H, W, 3) uint8 array");
  }
  return RgbImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                  std::vector<uint8_t>(a.data(), a.data() + a.size()));
}

py::array_t<uint8_t> FromImage(const RgbImage& img) {
  py::array_t<uint8_t> out({img.height(), img.width(), 3});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size());
  return out;
}

py::tuple BoxTuple(const Box& b) { return py::make_tuple(b.x0, b.y0, b.x1, b.y1); }

using InpaintFn = std::function<ImageArray(py::array_t<uint8_t>, py::array_t<bool>, std::string)>;

// Adapts a Python callable (image, mask, prompt) -> image.
class CallableInpainter : public InpainterBackend {
 public:
  explicit CallableInpainter(InpaintFn fn) : fn_(std::move(fn)) {}
  std::string name() const override { return "python"; }

 protected:
  RgbImage DoInpaint(const RgbImage& image, const BinaryMask& mask,
                     const std::string& prompt) override {
    return ToImage(fn_(FromImage(image), FromMask(mask), prompt));
  }

 private:
  InpaintFn fn_;
};

std::unique_ptr<InpainterBackend> MakeInpainterFor(const py::object& inpainter, int ring) {
  if (inpainter.is_none()) return std::make_unique<StubInpainter>(ring);
  return std::make_unique<CallableInpainter>(inpainter.cast<InpaintFn>());
}

py::dict ConfusionDict(const Confusion& c) {
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["tn"] = c.tn;
  return d;
}

}  // namespace
}  // namespace pal

PYBIND11_MODULE(_core, m) {
  using namespace pal;
  m.doc() = "Perceptual artifact localization and zoom-in refinement.";

  py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);
  py::register_exception<DecodeError>(m, "DecodeError", PyExc_ValueError);
  py::register_exception<LookupError>(m, "LookupError", PyExc_KeyError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
  py::register_exception<PipelineError>(m, "PipelineError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "decode_mask",
      [](py::bytes data, int threshold) {
        const std::string s = data;
        return FromMask(DecodeMask(
            {reinterpret_cast<const uint8_t*>(s.data()), s.size()}, threshold));
      },
      py::arg("png"), py::arg("threshold") = 127);
  m.def(
      "encode_mask",
      [](const MaskArray& mask) {
        const auto png = EncodeMask(ToMask(mask));
        return py::bytes(reinterpret_cast<const char*>(png.data()), png.size());
      },
      py::arg("mask"));

  m.def(
      "connected_components",
      [](const MaskArray& mask, const std::string& connectivity) {
        const Connectivity conn = ParseConnectivity(connectivity);
        py::list out;
        for (const auto& c : ConnectedComponents(ToMask(mask), conn).components) {
          py::dict d;
          d["label"] = c.label;
          d["area"] = c.area;
          d["bbox"] = BoxTuple(c.bbox);
          out.append(d);
        }
        return out;
      },
      py::arg("mask"), py::arg("connectivity") = "eight",
      "Components in raster order of their first pixel; bbox is inclusive "
      "(x0, y0, x1, y1).");
  m.def("dilate", [](const MaskArray& mask, int r) { return FromMask(Dilate(ToMask(mask), r)); },
        py::arg("mask"), py::arg("radius"));
  m.def("erode", [](const MaskArray& mask, int r) { return FromMask(Erode(ToMask(mask), r)); },
        py::arg("mask"), py::arg("radius"));
  m.def("par", [](const MaskArray& mask) { return Par(ToMask(mask)); }, py::arg("mask"));
  m.def(
      "rank_by_par",
      [](const std::vector<std::pair<std::string, double>>& records) {
        std::vector<ParRecord> in;
        for (const auto& [id, p] : records) in.push_back({id, p, std::nullopt, std::nullopt});
        std::vector<std::pair<std::string, double>> out;
        for (const auto& r : RankByPar(in)) out.emplace_back(r.image_id, r.par);
        return out;
      },
      py::arg("records"), "Sorts (image_id, par) pairs by ascending PAR, ties by id.");

  m.def(
      "plan_crops",
      [](const MaskArray& mask, double scale, int radius, const std::string& connectivity) {
        const Connectivity conn = ParseConnectivity(connectivity);
        const BinaryMask m = ToMask(mask);
        py::list out;
        for (const auto& c : PlanCrops(m, m.width(), m.height(), scale, radius, conn).crops) {
          py::dict d;
          d["label"] = c.component_label;
          d["box"] = BoxTuple(c.box);
          d["region_mask"] = FromMask(c.region_mask);
          out.append(d);
        }
        return out;
      },
      py::arg("mask"), py::arg("scale") = kDefaultCropScale, py::arg("dilation_radius") = 0,
      py::arg("connectivity") = "eight");
  m.def(
      "refine",
      [](const ImageArray& image, const MaskArray& mask, const py::object& inpainter,
         double scale, int radius, int feather, const std::string& prompt) {
        auto backend = MakeInpainterFor(inpainter, 3);
        RefineOptions o;
        o.scale = scale;
        o.dilation_radius = radius;
        o.feather = feather;
        o.prompt = prompt;
        return FromImage(Refine(ToImage(image), ToMask(mask), *backend, o));
      },
      py::arg("image"), py::arg("mask"), py::arg("inpainter") = py::none(),
      py::arg("scale") = kDefaultCropScale, py::arg("dilation_radius") = 1,
      py::arg("feather") = kDefaultFeather, py::arg("prompt") = std::string(kFallbackPrompt),
      "Zoom-in refinement. `inpainter` is a callable (image, mask, prompt) -> "
      "image; None uses the built-in mean-fill stub.");
  m.def(
      "naive_refine",
      [](const ImageArray& image, const MaskArray& mask, const py::object& inpainter,
         int radius, const std::string& prompt) {
        auto backend = MakeInpainterFor(inpainter, 3);
        return FromImage(NaiveRefine(ToImage(image), ToMask(mask), *backend, radius, prompt));
      },
      py::arg("image"), py::arg("mask"), py::arg("inpainter") = py::none(),
      py::arg("dilation_radius") = 1, py::arg("prompt") = std::string(kFallbackPrompt));
  m.def(
      "stub_detect",
      [](const ImageArray& image, double threshold) {
        StubDetector det(threshold);
        return FromMask(det.Detect("", ToImage(image)));
      },
      py::arg("image"), py::arg("laplacian_threshold") = 40.0);
  m.def(
      "default_prompt",
      [](const std::string& domain) { return DefaultPrompt(DefaultPromptRules(), domain); },
      py::arg("domain"));

  m.def(
      "evaluate_miou",
      [](const std::vector<std::tuple<std::string, MaskArray, MaskArray>>& pairs) {
        std::vector<EvalPair> in;
        for (const auto& [id, pred, gt] : pairs) in.push_back({id, ToMask(pred), ToMask(gt)});
        const EvalReport r = EvaluateMiou(in);
        py::dict d;
        py::list per_image;
        for (const auto& item : r.per_image) {
          py::dict c = ConfusionDict(item.confusion);
          c["image_id"] = item.image_id;
          per_image.append(c);
        }
        d["per_image"] = per_image;
        d["aggregate"] = ConfusionDict(r.aggregate);
        d["iou_artifact"] = r.iou_artifact;
        d["iou_background"] = r.iou_background;
        d["miou"] = r.miou;
        d["mean_image_iou_artifact"] = r.mean_image_iou_artifact;
        d["mean_image_miou"] = r.mean_image_miou;
        return d;
      },
      py::arg("pairs"), "pairs: list of (image_id, pred, gt).");
  m.def(
      "permutation_test",
      [](const std::vector<int>& votes, int64_t n, uint64_t seed) {
        return PermutationTest({"", votes}, n, seed);
      },
      py::arg("votes"), py::arg("n_permutations") = 1000000, py::arg("seed") = 0);
  m.def("holm_bonferroni", &HolmBonferroni, py::arg("p_values"), py::arg("alpha") = 0.05);

  m.def(
      "run_command",
      [](const std::string& command, const std::string& manifest, const std::string& out,
         std::optional<std::string> config, std::optional<int> parallelism, uint64_t seed,
         bool strict) {
        CommandOptions o;
        o.command = command;
        o.manifest_path = manifest;
        o.out_dir = out;
        o.config_path = std::move(config);
        o.parallelism = parallelism;
        o.seed = seed;
        o.strict = strict;
        py::gil_scoped_release release;
        return RunCommand(o);
      },
      py::arg("command"), py::arg("manifest"), py::arg("out") = "out",
      py::arg("config") = py::none(), py::arg("parallelism") = py::none(),
      py::arg("seed") = 0, py::arg("strict") = false,
      "Runs a pal subcommand in process and returns its exit code.");
}
