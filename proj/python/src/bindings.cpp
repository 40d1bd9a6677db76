#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "filanet/image_io.hpp"
#include "filanet/learning.hpp"
#include "filanet/metrics.hpp"
#include "filanet/network.hpp"
#include "filanet/synthgen.hpp"
#include "filanet/windowing.hpp"

namespace py = pybind11;
using namespace filanet;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

py::array_t<std::uint8_t> to_array(int height, int width, const std::vector<std::uint8_t>& data) {
    return py::array_t<std::uint8_t>({height, width},
                                     {static_cast<py::ssize_t>(width), py::ssize_t{1}},
                                     data.data());
}

std::tuple<int, int, std::vector<std::uint8_t>> from_array(const U8Array& a, const char* what) {
    if (a.ndim() != 2) {
        throw DataError(std::string(what) + " must be a 2-D array, got " +
                        std::to_string(a.ndim()) + " dimensions");
    }
    const auto height = static_cast<int>(a.shape(0));
    const auto width = static_cast<int>(a.shape(1));
    const auto* p = a.data();
    return {height, width, std::vector<std::uint8_t>(p, p + a.size())};
}

ImageFragment image_from(const U8Array& a) {
    auto [height, width, data] = from_array(a, "image");
    return ImageFragment(height, width, std::move(data));
}

LabelMask mask_from(const U8Array& a) {
    auto [height, width, data] = from_array(a, "mask");
    for (auto& v : data) v = v ? 1 : 0;
    return LabelMask(height, width, std::move(data));
}

py::array_t<std::uint8_t> image_to(const ImageFragment& img) {
    return to_array(img.height(), img.width(), img.pixels());
}

py::array_t<std::uint8_t> mask_to(const LabelMask& mask) {
    return to_array(mask.height(), mask.width(), mask.labels());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Three-neuron filament detector: sliding-window sums, a polynomial "
              "background fit, and a perceptron-trained threshold. Images and masks "
              "are uint8 numpy arrays of shape (height, width).";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<BackgroundCoefficients>(m, "BackgroundCoefficients")
        .def(py::init([](int degree, double c0, double c1, double c2) {
                 return BackgroundCoefficients{degree, c0, c1, c2};
             }),
             py::arg("degree") = 2, py::arg("c0") = 0.0, py::arg("c1") = 0.0,
             py::arg("c2") = 0.0)
        .def_readwrite("degree", &BackgroundCoefficients::degree)
        .def_readwrite("c0", &BackgroundCoefficients::c0)
        .def_readwrite("c1", &BackgroundCoefficients::c1)
        .def_readwrite("c2", &BackgroundCoefficients::c2)
        .def("__repr__", [](const BackgroundCoefficients& c) {
            return "BackgroundCoefficients(degree=" + std::to_string(c.degree) +
                   ", c0=" + std::to_string(c.c0) + ", c1=" + std::to_string(c.c1) +
                   ", c2=" + std::to_string(c.c2) + ")";
        });

    py::class_<FitReport>(m, "FitReport")
        .def_readonly("coefficients", &FitReport::coefficients)
        .def_readonly("rms_residual", &FitReport::rms_residual)
        .def_readonly("iterations", &FitReport::iterations)
        .def_readonly("reweighted", &FitReport::reweighted);

    py::class_<ModelWeights>(m, "Model")
        .def_property_readonly("k", [](const ModelWeights& w) { return w.window.k; })
        .def_property_readonly("w0", [](const ModelWeights& w) { return w.output.w0; })
        .def_property_readonly("ws", [](const ModelWeights& w) { return w.output.ws; })
        .def_property_readonly("wu", [](const ModelWeights& w) { return w.output.wu; })
        .def_property_readonly("background",
                               [](const ModelWeights& w) { return w.background; })
        .def_readonly("feature_scale", &ModelWeights::feature_scale)
        .def_readwrite("bg_refit", &ModelWeights::bg_refit)
        .def("save", [](const ModelWeights& w, const std::filesystem::path& path) {
                 save_model(w, path);
             },
             py::arg("path"))
        .def_static("load", &load_model, py::arg("path"))
        .def("__repr__", [](const ModelWeights& w) {
            return "Model(k=" + std::to_string(w.window.k) + ", ws=" +
                   std::to_string(w.output.ws) + ", wu=" + std::to_string(w.output.wu) +
                   ", w0=" + std::to_string(w.output.w0) + ")";
        });

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("training_error", &TrainResult::training_error)
        .def_readonly("background_rms", &TrainResult::background_rms);

    py::class_<Scores>(m, "Scores")
        .def_property_readonly("tp", [](const Scores& s) { return s.counts.tp; })
        .def_property_readonly("fp", [](const Scores& s) { return s.counts.fp; })
        .def_property_readonly("tn", [](const Scores& s) { return s.counts.tn; })
        .def_property_readonly("fn", [](const Scores& s) { return s.counts.fn; })
        .def_readonly("precision", &Scores::precision)
        .def_readonly("recall", &Scores::recall)
        .def_readonly("f1", &Scores::f1)
        .def_readonly("accuracy", &Scores::accuracy)
        .def_readonly("precision_defined", &Scores::precision_defined)
        .def_readonly("recall_defined", &Scores::recall_defined)
        .def_readonly("f1_defined", &Scores::f1_defined)
        .def("__repr__", [](const Scores& s) {
            return "Scores(precision=" + std::to_string(s.precision) + ", recall=" +
                   std::to_string(s.recall) + ", f1=" + std::to_string(s.f1) + ")";
        });

    py::class_<Filament>(m, "Filament")
        .def(py::init([](std::vector<std::pair<double, double>> polyline, double half_width,
                         double depth) {
                 return Filament{std::move(polyline), half_width, depth};
             }),
             py::arg("polyline"), py::arg("half_width") = 1.5, py::arg("depth") = 60.0)
        .def_readwrite("polyline", &Filament::polyline)
        .def_readwrite("half_width", &Filament::half_width)
        .def_readwrite("depth", &Filament::depth);

    py::class_<SynthParams>(m, "SynthParams")
        .def(py::init<>())
        .def_readwrite("height", &SynthParams::height)
        .def_readwrite("width", &SynthParams::width)
        .def_readwrite("b0", &SynthParams::b0)
        .def_readwrite("bx", &SynthParams::bx)
        .def_readwrite("by", &SynthParams::by)
        .def_readwrite("bxx", &SynthParams::bxx)
        .def_readwrite("byy", &SynthParams::byy)
        .def_readwrite("filaments", &SynthParams::filaments)
        .def_readwrite("noise_sigma", &SynthParams::noise_sigma)
        .def_readwrite("seed", &SynthParams::seed);

    py::class_<CorpusRanges>(m, "CorpusRanges")
        .def(py::init<>())
        .def_readwrite("slope_x_max", &CorpusRanges::slope_x_max)
        .def_readwrite("slope_y_max", &CorpusRanges::slope_y_max)
        .def_readwrite("curve_x_max", &CorpusRanges::curve_x_max)
        .def_readwrite("curve_y_max", &CorpusRanges::curve_y_max)
        .def_readwrite("filaments_min", &CorpusRanges::filaments_min)
        .def_readwrite("filaments_max", &CorpusRanges::filaments_max)
        .def_readwrite("depth_min", &CorpusRanges::depth_min)
        .def_readwrite("depth_max", &CorpusRanges::depth_max)
        .def_readwrite("half_width_min", &CorpusRanges::half_width_min)
        .def_readwrite("half_width_max", &CorpusRanges::half_width_max)
        .def_readwrite("length_frac_min", &CorpusRanges::length_frac_min)
        .def_readwrite("length_frac_max", &CorpusRanges::length_frac_max)
        .def_readwrite("polyline_points", &CorpusRanges::polyline_points)
        .def_readwrite("margin_frac", &CorpusRanges::margin_frac);

    py::class_<CorpusItem>(m, "CorpusItem")
        .def_readonly("params", &CorpusItem::params)
        .def_property_readonly("image",
                               [](const CorpusItem& it) { return image_to(it.image); })
        .def_property_readonly("mask",
                               [](const CorpusItem& it) { return mask_to(it.mask); });

    m.def("load_image",
          [](const std::filesystem::path& path) { return image_to(load_image(path)); },
          py::arg("path"), "Read a PGM fragment as a uint8 array.");
    m.def("save_image",
          [](const U8Array& image, const std::filesystem::path& path) {
              save_image(image_from(image), path);
          },
          py::arg("image"), py::arg("path"), "Write a fragment as raw PGM.");
    m.def("load_mask",
          [](const std::filesystem::path& path) { return mask_to(load_mask(path)); },
          py::arg("path"), "Read a PBM/PGM mask as a 0/1 uint8 array.");
    m.def("save_mask",
          [](const U8Array& mask, const std::filesystem::path& path) {
              save_mask(mask_from(mask), path);
          },
          py::arg("mask"), py::arg("path"), "Write a mask as raw PGM, filament = 255.");

    m.def("normalize_index", &normalize_index, py::arg("j"), py::arg("q"),
          "Map a 0-based scan index onto t in [-1, 1].");
    m.def("background_eval", &background_eval, py::arg("coefficients"), py::arg("j"),
          py::arg("q"), "Evaluate the background polynomial at scan index j of q.");

    m.def("build_columns",
          [](const U8Array& image, int k) {
              const ColumnMatrix cols = build_columns(image_from(image), WindowConfig(k));
              return py::array_t<std::uint8_t>(
                  {cols.rows(), cols.cols()},
                  {py::ssize_t{1}, static_cast<py::ssize_t>(cols.rows())},
                  cols.column(0).data());
          },
          py::arg("image"), py::arg("k") = 5,
          "Unroll every k-by-k window into one column of an r-by-q uint8 array.");

    m.def("fit_background",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> s, int degree) {
              return fit_background({s.data(), static_cast<std::size_t>(s.size())}, degree);
          },
          py::arg("s"), py::arg("degree") = 2,
          "Ordinary least squares fit of the background polynomial to window sums.");
    m.def("fit_background_robust",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> s, int degree,
             double huber_delta, int max_iters) {
              return fit_background_robust({s.data(), static_cast<std::size_t>(s.size())},
                                           degree, huber_delta, max_iters);
          },
          py::arg("s"), py::arg("degree") = 2, py::arg("huber_delta") = 0.0,
          py::arg("max_iters") = 10,
          "Huber-reweighted fit; huber_delta <= 0 picks the delta from the residual MAD.");

    m.def("generate",
          [](const SynthParams& params) {
              const auto [image, mask] = generate(params);
              return py::make_tuple(image_to(image), mask_to(mask));
          },
          py::arg("params"), "Render one synthetic fragment: (image, mask) arrays.");
    m.def("rasterize_filament",
          [](int height, int width, const Filament& filament) {
              return mask_to(rasterize_filament(height, width, filament));
          },
          py::arg("height"), py::arg("width"), py::arg("filament"),
          "Mask of one filament's geometric region, without background or noise.");
    m.def("corpus", &corpus, py::arg("count"), py::arg("base"), py::arg("seed"),
          py::arg("ranges") = CorpusRanges{},
          "Generate a corpus of fragments with randomized backgrounds and filaments.");

    m.def("train",
          [](const U8Array& image, const U8Array& mask, int k, int degree, bool robust,
             double huber_delta, bool bg_refit, double learning_rate, int epochs,
             std::uint64_t seed) {
              TrainOptions opts;
              opts.degree = degree;
              opts.robust = robust;
              opts.huber_delta = huber_delta;
              opts.bg_refit = bg_refit;
              opts.perceptron.learning_rate = learning_rate;
              opts.perceptron.max_epochs = epochs;
              opts.perceptron.shuffle_seed = seed;
              return train(image_from(image), mask_from(mask), WindowConfig(k), opts);
          },
          py::arg("image"), py::arg("mask"), py::arg("k") = 5, py::arg("degree") = 2,
          py::arg("robust") = false, py::arg("huber_delta") = 0.0, py::arg("bg_refit") = true,
          py::arg("learning_rate") = 0.1, py::arg("epochs") = 200, py::arg("seed") = 0,
          "Train the three-neuron model on one labelled fragment.");

    m.def("detect",
          [](const U8Array& image, const ModelWeights& model, bool robust, double huber_delta,
             bool pad) {
              const ImageFragment img = image_from(image);
              ForwardOptions opts;
              opts.robust_refit = robust;
              opts.huber_delta = huber_delta;
              const DetectionMask detection = forward(img, model, opts);
              if (pad) return mask_to(pad_mask(detection, img.height(), img.width()));
              return mask_to(detection.labels);
          },
          py::arg("image"), py::arg("model"), py::arg("robust") = false,
          py::arg("huber_delta") = 0.0, py::arg("pad") = false,
          "Classify every interior pixel; pad=True embeds the result in a full-size mask.");

    m.def("score",
          [](const U8Array& pred, const U8Array& truth, int k) {
              const WindowConfig cfg(k);
              return score(DetectionMask{mask_from(pred), cfg.offset()}, mask_from(truth), cfg);
          },
          py::arg("pred"), py::arg("truth"), py::arg("k") = 5,
          "Score an interior prediction against a full-size or interior truth mask.");
}
