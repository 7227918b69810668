/* @ts-self-types="./pilotsim_web.d.ts" */

/**
 * Capacity curves over a threshold grid in dB.
 */
export class CapacityCurves {
    static __wrap(ptr) {
        const obj = Object.create(CapacityCurves.prototype);
        obj.__wbg_ptr = ptr;
        CapacityCurvesFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CapacityCurvesFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_capacitycurves_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get fixed_kappa() {
        const ret = wasm.capacitycurves_fixed_kappa(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get fixed_tau() {
        const ret = wasm.capacitycurves_fixed_tau(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get fpr() {
        const ret = wasm.capacitycurves_fpr(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get gamma_db() {
        const ret = wasm.capacitycurves_gamma_db(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) CapacityCurves.prototype[Symbol.dispose] = CapacityCurves.prototype.free;

/**
 * BS sites, user positions and hexagon outlines as flat `x, y` arrays.
 */
export class Layout {
    static __wrap(ptr) {
        const obj = Object.create(Layout.prototype);
        obj.__wbg_ptr = ptr;
        LayoutFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        LayoutFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_layout_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get bs() {
        const ret = wasm.layout_bs(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Six vertices per cell.
     * @returns {Float64Array}
     */
    get cells() {
        const ret = wasm.layout_cells(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Users cell by cell, `K` users each.
     * @returns {Float64Array}
     */
    get users() {
        const ret = wasm.layout_users(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) Layout.prototype[Symbol.dispose] = Layout.prototype.free;

/**
 * Sorted FPR limiting SINRs (dB) and the DOP limit they are compared with.
 */
export class SinrComparison {
    static __wrap(ptr) {
        const obj = Object.create(SinrComparison.prototype);
        obj.__wbg_ptr = ptr;
        SinrComparisonFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SinrComparisonFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_sinrcomparison_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get dop_db() {
        const ret = wasm.sinrcomparison_dop_db(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get fpr_db() {
        const ret = wasm.sinrcomparison_fpr_db(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get p_dop_better() {
        const ret = wasm.sinrcomparison_p_dop_better(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) SinrComparison.prototype[Symbol.dispose] = SinrComparison.prototype.free;

/**
 * @param {bigint} seed
 * @param {number} theta
 * @param {number} kappa
 * @param {number} beta
 * @param {number} sigma2_over_pu
 * @param {number} gamma_min_db
 * @param {number} gamma_max_db
 * @param {number} realizations
 * @returns {CapacityCurves}
 */
export function capacity_curves(seed, theta, kappa, beta, sigma2_over_pu, gamma_min_db, gamma_max_db, realizations) {
    const ret = wasm.capacity_curves(seed, theta, kappa, beta, sigma2_over_pu, gamma_min_db, gamma_max_db, realizations);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return CapacityCurves.__wrap(ret[0]);
}

/**
 * @param {bigint} seed
 * @param {number} alpha
 * @param {number} kappa
 * @param {number} sigma2_over_pu
 * @param {number} realizations
 * @param {number} inner_radius
 * @param {boolean} flat_top
 * @returns {SinrComparison}
 */
export function compare_sinr(seed, alpha, kappa, sigma2_over_pu, realizations, inner_radius, flat_top) {
    const ret = wasm.compare_sinr(seed, alpha, kappa, sigma2_over_pu, realizations, inner_radius, flat_top);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return SinrComparison.__wrap(ret[0]);
}

/**
 * @param {bigint} seed
 * @param {number} users_per_cell
 * @param {number} inner_radius
 * @param {boolean} flat_top
 * @returns {Layout}
 */
export function drop_users(seed, users_per_cell, inner_radius, flat_top) {
    const ret = wasm.drop_users(seed, users_per_cell, inner_radius, flat_top);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Layout.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_generic_0000000000000001: function(arg0, arg1) {
            // Cast intrinsic for `Ref(String) -> Externref`.
            const ret = getStringFromWasm0(arg0, arg1);
            return ret;
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./pilotsim_web_bg.js": import0,
    };
}

const CapacityCurvesFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_capacitycurves_free(ptr, 1));
const LayoutFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_layout_free(ptr, 1));
const SinrComparisonFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_sinrcomparison_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('pilotsim_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
