"""
Filename evidence
=================

Most platforms rename uploads with a recognisable scheme. The matcher
returns every platform whose scheme fits, with the embedded image ID and,
where the platform allows it, the URL to look the original up.
"""
from ballistics.filenames import match_filename

names = [
    "11008414_746657488782610_8508378989307666639_n.jpg",
    "26742193671_8a63f10c85_h.jpg",
    "tumblr_o3q9ghRCRh1vnf44lo9_1280.jpg",
    "04 - Dw0KXG2.jpg",
    "CdqCPQ-WAAAzrHI.jpg",
    "IMG-20160314-WA0038.jpg",
    "1zqdirm.jpg",
    "1689555_169215806798447_744040439_n.jpg",
    "422114602_5593965449613038107.jpg",
    "IMG_2641.jpg",
]
for name in names:
    matches = match_filename(name)
    print(name)
    if not matches:
        print("    no platform scheme matches")
    for m in matches:
        extras = {k: v for k, v in m.to_dict().items() if v and k not in ("sns", "specificity")}
        print(f"    {m.sns.value:10s} {m.specificity.value:6s} {extras}")
