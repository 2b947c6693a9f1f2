"""
What platforms do to an upload
==============================

Send one camera original through every platform profile and compare what
comes out: geometry, quantization tables, metadata and the new file name.
The tables are stand-in fixtures; what matters is that each platform leaves
its own, stable trace.
"""
from ballistics.features import analyze_bytes
from ballistics.labels import SelectionMethod, UploadClient
from ballistics.profiles import default_profiles
from ballistics.simulator import SimulationJob, make_camera_jpeg, simulate_upload

profiles = default_profiles()
source = make_camera_jpeg(3264, 2448, seed=1)
_, exif, v = analyze_bytes(source)
print(f"original: {v.w}x{v.h}, {v.exif_count} EXIF entries, l0={v.lum[0]}, c0={v.chroma[0]}, "
      f"{len(source) / 1e6:.2f} MB\n")

print(f"{'platform':11s} {'size':>10s} {'EXIF':>5s} {'l0':>3s} {'c0':>3s}  filename / steps")
for profile in profiles:
    job = SimulationJob(source, profile, seed=1, source_name="IMG_2641.jpg")
    out = simulate_upload(job, profiles)
    _, _, w = analyze_bytes(out.data)
    print(f"{profile.sns.value:11s} {w.w:>5d}x{w.h:<4d} {w.exif_count:5d} {w.lum[0]:3d} {w.chroma[0]:3d}  "
          f"{out.filename}")
    print(f"{'':33s}{'; '.join(out.steps)}")

# Native apps leave a second trace: the app re-encodes on the device before
# the platform touches the file, and its chrominance table survives.
print()
for client, method in [(UploadClient.BROWSER, SelectionMethod.NOT_APPLICABLE),
                       (UploadClient.ANDROID_APP, SelectionMethod.LOCAL_GALLERY),
                       (UploadClient.IOS_APP, SelectionMethod.EMBEDDED_CAMERA)]:
    out = simulate_upload(SimulationJob(source, profiles["Twitter"], client, method, seed=2), profiles)
    _, _, w = analyze_bytes(out.data)
    print(f"Twitter via {client.value}/{method.value}: l0={w.lum[0]} c0={w.chroma[0]} EXIF={w.exif_count}")
