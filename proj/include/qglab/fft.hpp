#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qglab/field.hpp"

namespace qglab {

/// FFTW-backed transforms between the retained spectral lattice and the
/// n x n physical grid. Plans are created once per resolution with
/// FFTW_ESTIMATE | FFTW_UNALIGNED, so results are deterministic run to run
/// and the shared plan can be executed on per-thread buffers concurrently.
class Transform {
public:
    static const Transform& of(int n) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<Transform>> cache;
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, std::unique_ptr<Transform>(new Transform(n))).first;
        return *it->second;
    }

    int n() const { return n_; }

    /// Synthesis: physical(x) = sum_k c(k) exp(i k.x), real part taken.
    void to_physical(const SpectralField& f, std::vector<double>& out) const {
        auto& ws = workspace();
        const int n = n_;
        ws.a.assign(static_cast<std::size_t>(n) * n, Complex{0.0, 0.0});
        const TorusGrid& g = f.grid();
        const int K = g.max_mode();
        for (int k2 = -K; k2 <= K; ++k2) {
            const int i2 = k2 >= 0 ? k2 : k2 + n;
            for (int k1 = -K; k1 <= K; ++k1) {
                const int i1 = k1 >= 0 ? k1 : k1 + n;
                ws.a[static_cast<std::size_t>(i1) * n + i2] = f.raw(g.index_of(k1, k2));
            }
        }
        ws.b.resize(ws.a.size());
        fftw_execute_dft(backward_,
                         reinterpret_cast<fftw_complex*>(ws.a.data()),
                         reinterpret_cast<fftw_complex*>(ws.b.data()));
        out.resize(ws.b.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = ws.b[i].real();
    }

    /// Analysis: gathers retained modes of a real physical array, enforces the
    /// zero-mean and Hermitian invariants exactly, drops everything else.
    void from_physical(const std::vector<double>& in, SpectralField& f) const {
        auto& ws = workspace();
        const int n = n_;
        ws.a.resize(static_cast<std::size_t>(n) * n);
        for (std::size_t i = 0; i < ws.a.size(); ++i) ws.a[i] = Complex{in[i], 0.0};
        ws.b.resize(ws.a.size());
        fftw_execute_dft(forward_,
                         reinterpret_cast<fftw_complex*>(ws.a.data()),
                         reinterpret_cast<fftw_complex*>(ws.b.data()));
        const TorusGrid& g = f.grid();
        const int K = g.max_mode();
        const double norm = 1.0 / (static_cast<double>(n) * n);
        for (int k2 = -K; k2 <= K; ++k2) {
            const int i2 = k2 >= 0 ? k2 : k2 + n;
            for (int k1 = -K; k1 <= K; ++k1) {
                const int i1 = k1 >= 0 ? k1 : k1 + n;
                f.raw(g.index_of(k1, k2)) = norm * ws.b[static_cast<std::size_t>(i1) * n + i2];
            }
        }
        f.symmetrize();
    }

    ~Transform() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;

private:
    struct Workspace {
        std::vector<Complex> a;
        std::vector<Complex> b;
    };
    static Workspace& workspace() {
        static thread_local Workspace ws;
        return ws;
    }

    explicit Transform(int n) : n_(n) {
        std::vector<Complex> a(static_cast<std::size_t>(n) * n), b(a.size());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_2d(n, n,
                                    reinterpret_cast<fftw_complex*>(a.data()),
                                    reinterpret_cast<fftw_complex*>(b.data()),
                                    FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_2d(n, n,
                                     reinterpret_cast<fftw_complex*>(a.data()),
                                     reinterpret_cast<fftw_complex*>(b.data()),
                                     FFTW_BACKWARD, flags);
    }

    int n_;
    fftw_plan forward_;
    fftw_plan backward_;
};

}  // namespace qglab
