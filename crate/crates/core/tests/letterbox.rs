use image::{Rgb, RgbImage};
use ocular_core::augment::{letterbox, letterbox_layout, InputSize};
use ocular_core::seed;
use rand::Rng;

#[test]
fn hundred_random_sources() {
    let mut rng = seed::rng(77);
    for target in [InputSize::DESK, InputSize::FULL] {
        let (tw, th) = (target.width as u32, target.height as u32);
        for _ in 0..100 {
            let (w, h) = (rng.gen_range(1..900u32), rng.gen_range(1..400u32));
            let layout = letterbox_layout(w, h, tw, th).unwrap();
            assert!(layout.content_width <= tw && layout.content_height <= th);
            assert!(layout.content_width == tw || layout.content_height == th, "{w}x{h}");
            let (sx, sy) = (w as f64 * layout.scale, h as f64 * layout.scale);
            assert!((layout.content_width as f64 - sx).abs() <= 0.5 || layout.content_width == 1);
            assert!((layout.content_height as f64 - sy).abs() <= 0.5 || layout.content_height == 1);
            assert_eq!(layout.offset_x, (tw - layout.content_width) / 2);
            assert_eq!(layout.offset_y, (th - layout.content_height) / 2);

            let out = letterbox(&RgbImage::from_pixel(w, h, Rgb([200, 200, 200])), tw, th).unwrap();
            assert_eq!(out.dimensions(), (tw, th));
            let lit = |x: u32, y: u32| out.get_pixel(x, y)[0] > 0;
            let cols = (0..tw).filter(|&x| (0..th).any(|y| lit(x, y))).count() as u32;
            let rows = (0..th).filter(|&y| (0..tw).any(|x| lit(x, y))).count() as u32;
            assert_eq!((cols, rows), (layout.content_width, layout.content_height), "{w}x{h}");
        }
    }
}

#[test]
fn full_size_examples() {
    let l = letterbox_layout(1024, 340, 512, 170).unwrap();
    assert_eq!((l.content_width, l.content_height, l.offset_x, l.offset_y), (512, 170, 0, 0));
    let l = letterbox_layout(512, 340, 512, 170).unwrap();
    assert_eq!((l.content_width, l.content_height), (256, 170));
    assert_eq!(l.offset_x, 128);
}
