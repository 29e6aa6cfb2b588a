/* @ts-self-types="./geophase_web.d.ts" */

/**
 * One simulated signal/reference pair and its fits.
 */
export class FringeDemo {
    static __wrap(ptr) {
        const obj = Object.create(FringeDemo.prototype);
        obj.__wbg_ptr = ptr;
        FringeDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        FringeDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_fringedemo_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get gamma() {
        const ret = wasm.fringedemo_gamma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gamma_theory() {
        const ret = wasm.fringedemo_gamma_theory(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get reference() {
        const ret = wasm.fringedemo_reference(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get reference_model() {
        const ret = wasm.fringedemo_reference_model(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get sigma_gamma() {
        const ret = wasm.fringedemo_sigma_gamma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get sigma_visibility() {
        const ret = wasm.fringedemo_sigma_visibility(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get signal() {
        const ret = wasm.fringedemo_signal(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Fitted signal fringe sampled on `model_voltages`.
     * @returns {Float64Array}
     */
    get signal_model() {
        const ret = wasm.fringedemo_signal_model(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get visibility() {
        const ret = wasm.fringedemo_visibility(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get voltages() {
        const ret = wasm.fringedemo_voltages(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) FringeDemo.prototype[Symbol.dispose] = FringeDemo.prototype.free;

/**
 * Bloch trajectory of |R> through the two half-wave plates, flattened as
 * `[s1, s2, s3, ...]`.
 * @param {number} theta1_deg
 * @param {number} theta2_deg
 * @param {number} steps
 * @returns {Float64Array}
 */
export function bloch_path(theta1_deg, theta2_deg, steps) {
    const ret = wasm.bloch_path(theta1_deg, theta2_deg, steps);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * Dense voltage grid the model curves are sampled on.
 * @returns {Float64Array}
 */
export function model_voltages() {
    const ret = wasm.model_voltages();
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * Solid angle (radians) enclosed by [`bloch_path`].
 * @param {number} theta1_deg
 * @param {number} theta2_deg
 * @param {number} steps
 * @returns {number}
 */
export function path_solid_angle(theta1_deg, theta2_deg, steps) {
    const ret = wasm.path_solid_angle(theta1_deg, theta2_deg, steps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return ret[0];
}

/**
 * Simulates the PZT scan for a decoherer-prepared state of purity `r` at
 * `theta1_deg` (theta2 = 0), with `counts_per_point` mean counts, and fits
 * it at the nominal fringe frequency.
 * @param {number} r
 * @param {number} theta1_deg
 * @param {number} counts_per_point
 * @param {bigint} seed
 * @returns {FringeDemo}
 */
export function simulate_fringe(r, theta1_deg, counts_per_point, seed) {
    const ret = wasm.simulate_fringe(r, theta1_deg, counts_per_point, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return FringeDemo.__wrap(ret[0]);
}

/**
 * `[theta1_deg, gamma, v, ...]` for `samples` settings across -45..45 deg.
 * Undefined phases are NaN.
 * @param {number} r
 * @param {number} samples
 * @returns {Float64Array}
 */
export function theory_curve(r, samples) {
    const ret = wasm.theory_curve(r, samples);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
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
        "./geophase_web_bg.js": import0,
    };
}

const FringeDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_fringedemo_free(ptr, 1));

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
        module_or_path = new URL('geophase_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
