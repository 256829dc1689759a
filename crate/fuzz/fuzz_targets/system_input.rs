#![no_main]

libfuzzer_sys::fuzz_target!(|data: &[u8]| {
    obstruct_fuzz::system_input(data);
});
