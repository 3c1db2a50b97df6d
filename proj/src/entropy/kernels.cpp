#include "forkent/entropy/kernels.hpp"

namespace forkent::entropy::kernels {

namespace {

bool cpu_has_avx2_fma() {
#if FORKENT_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

BatchFn pick_auto(std::string_view& name) {
#if FORKENT_HAVE_AVX2
    if (cpu_has_avx2_fma()) {
        name = "avx2";
        return &accumulate_avx2;
    }
#endif
    name = "scalar";
    return &accumulate_scalar;
}

struct Dispatch {
    BatchFn fn;
    std::string_view name;

    Dispatch() { fn = pick_auto(name); }
};

Dispatch g_dispatch;

}  // namespace

BatchFn active() {
    return g_dispatch.fn;
}

std::string_view active_name() {
    return g_dispatch.name;
}

bool select(std::string_view name) {
    if (name == "auto") {
        g_dispatch.fn = pick_auto(g_dispatch.name);
        return true;
    }
    if (name == "scalar") {
        g_dispatch.fn = &accumulate_scalar;
        g_dispatch.name = "scalar";
        return true;
    }
#if FORKENT_HAVE_AVX2
    if (name == "avx2" && cpu_has_avx2_fma()) {
        g_dispatch.fn = &accumulate_avx2;
        g_dispatch.name = "avx2";
        return true;
    }
#endif
    return false;
}

std::vector<std::string> available() {
    std::vector<std::string> names{"scalar"};
    if (cpu_has_avx2_fma()) {
        names.emplace_back("avx2");
    }
    return names;
}

}  // namespace forkent::entropy::kernels
