#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridclf/app.hpp"
#include "hybridclf/checkpoint.hpp"
#include "hybridclf/config.hpp"
#include "hybridclf/errors.hpp"
#include "hybridclf/metrics.hpp"
#include "hybridclf/preprocess.hpp"

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace hybridclf;

namespace {

// Configuration crosses the boundary as JSON text.
RunConfig parse_config(const std::string& config_json) {
    return run_config_from_json(nlohmann::json::parse(config_json));
}

std::vector<std::string> preprocess_text(const std::string& text, const std::string& config_json) {
    return preprocess(text, parse_config(config_json).preprocess_config()).tokens;
}

std::string stats(const std::string& config_json) { return run_stats(parse_config(config_json)).dump(); }

std::string train_model(const std::string& config_json) {
    const Checkpoint ck = run_train(parse_config(config_json));
    nlohmann::json out;
    out["vocab_size"] = ck.vocab.size();
    out["parameters"] = ck.params.parameter_count();
    out["history"] = nlohmann::json::array();
    for (const auto& r : ck.history)
        out["history"].push_back({{"epoch", r.epoch},
                                  {"train_loss", r.train_loss},
                                  {"train_acc", r.train_acc},
                                  {"val_loss", r.val_loss},
                                  {"val_acc", r.val_acc}});
    return out.dump();
}

std::string cross_validate_run(const std::string& config_json) {
    return aggregate_to_json(run_cross_validate(parse_config(config_json))).dump();
}

std::string evaluate_checkpoint(const std::string& checkpoint, const std::string& corpus) {
    return report_to_json(run_evaluate(load_checkpoint(checkpoint), corpus)).dump();
}

std::string predict(const std::string& checkpoint, const std::string& text, std::size_t top_n) {
    return prediction_to_json(predict_text(load_checkpoint(checkpoint), text, top_n)).dump();
}

std::pair<std::vector<std::pair<double, double>>, double> roc(const std::vector<double>& scores,
                                                            const std::vector<int>& labels) {
    const RocResult r = roc_auc(scores, labels);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : r.curve.points) pts.emplace_back(p.fpr, p.tpr);
    return {pts, r.auc};
}

py::dict scalar(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    const ScalarMetrics s = scalar_metrics({tp, fp, fn, tn});
    py::dict d;
    d["accuracy"] = s.accuracy;
    d["precision"] = s.precision;
    d["recall"] = s.recall;
    d["f1"] = s.f1;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid CNN-LSTM-attention deceptive web page classifier";

    static PyObject* error_type = PyErr_NewException("hybridclf._core.Error", PyExc_RuntimeError, nullptr);
    m.attr("Error") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("kind") = e.kind();
            PyErr_SetObject(error_type, inst.ptr());
        } catch (const nlohmann::json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("preprocess", &preprocess_text, py::arg("text"), py::arg("config_json") = "{}");
    m.def("lemmatize", [](const std::string& t) { return lemmatize(t); });
    m.def("tokenize", [](const std::string& t, std::size_t min_len) { return tokenize(t, min_len); },
          py::arg("text"), py::arg("min_token_len") = 2);
    m.def("generate_bigrams", &generate_bigrams);
    m.def("stats", &stats, py::call_guard<py::gil_scoped_release>());
    m.def("train", &train_model, py::call_guard<py::gil_scoped_release>());
    m.def("cross_validate", &cross_validate_run, py::call_guard<py::gil_scoped_release>());
    m.def("evaluate", &evaluate_checkpoint, py::arg("checkpoint"), py::arg("corpus"),
          py::call_guard<py::gil_scoped_release>());
    m.def("predict", &predict, py::arg("checkpoint"), py::arg("text"), py::arg("top_n") = 10,
          py::call_guard<py::gil_scoped_release>());
    m.def("roc_auc", &roc, py::arg("scores"), py::arg("labels"));
    m.def("scalar_metrics", &scalar, py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));
}
