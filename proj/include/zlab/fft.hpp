#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace zlab::detail {

// Shared FFTW plans per grid size. Plans are created once under a lock with
// FFTW_ESTIMATE | FFTW_UNALIGNED (deterministic across runs, executable on any
// buffer); execution through the new-array interface is thread-safe.
class FftPlans {
  public:
    static FftPlans& of(int m) {
        static std::mutex mtx;
        static std::map<int, FftPlans*> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(m);
        if (it == cache.end())
            it = cache.emplace(m, new FftPlans(m)).first;
        return *it->second;
    }

    void forward(std::complex<double>* data) const {
        fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }
    void backward(std::complex<double>* data) const {
        fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

  private:
    explicit FftPlans(int m) {
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(m) * m);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_2d(m, m, p, p, FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_2d(m, m, p, p, FFTW_BACKWARD, flags);
    }

    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace zlab::detail
