#!/usr/bin/env python3
"""Regenerates the committed test fixtures under tests/fixtures/.

Produces a 20-sample corpus (10 phish-shaped, 10 benign-shaped), the replay
cassette covering every tool call those samples make, and one scripted-gateway
scenario per sample. Run from the repo root:

    python3 scripts/gen_fixtures.py
"""

import io
import json
import os
import shutil

from PIL import Image

ROOT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def fnv1a64(data: bytes) -> str:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def png_bytes(size, color, stripes=None) -> bytes:
    img = Image.new("RGB", size, color)
    if stripes:
        px = img.load()
        for y in range(size[1]):
            for x in range(size[0]):
                if (x + y) % stripes == 0:
                    px[x, y] = (0, 0, 0)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def sr(title, link, display_link, rank, snippet=""):
    return {
        "title": title,
        "snippet": snippet or f"{title} official website.",
        "link": link,
        "display_link": display_link,
        "rank": rank,
    }


def domains_to_results(domains):
    return [
        sr(d.split(".")[0].title(), f"https://www.{d}/", d, i + 1)
        for i, d in enumerate(domains)
    ]


def tool_step(name, query):
    return {"kind": "tool", "name": name, "arguments": {"query": query}}


def final_step(brand, reason):
    return {
        "kind": "final",
        "text": json.dumps({"brand_name": brand, "reason": reason}),
    }


def main():
    corpus = os.path.join(ROOT, "corpus")
    cassettes = os.path.join(ROOT, "cassettes")
    scenarios = os.path.join(ROOT, "scenarios")
    blobs = os.path.join(cassettes, "blobs")
    for d in (corpus, cassettes, scenarios, blobs):
        shutil.rmtree(d, ignore_errors=True)
        os.makedirs(d)

    att_logo = png_bytes((32, 32), (0, 115, 182), stripes=5)
    att_alt = png_bytes((32, 32), (200, 40, 40), stripes=3)
    att_shot = png_bytes((64, 48), (240, 245, 250), stripes=7)
    blank_shot = png_bytes((64, 48), (255, 255, 255))

    cassette_entries = []

    def record(tool, key, response):
        cassette_entries.append(
            {"tool": tool, "key": key, "response": response, "recorded_at": 1700000000}
        )

    def store_blob(data):
        h = fnv1a64(data)
        with open(os.path.join(blobs, h), "wb") as f:
            f.write(data)
        return h

    # --- search results per brand -------------------------------------
    brand_results = {
        "Nike": ["nike.com", "nike.co.uk", "wikipedia.org"],
        "PayPal": ["paypal.com", "paypal.co.uk", "wikipedia.org"],
        "AT&T": ["att.com", "att.net", "about.att.com", "wikipedia.org"],
        "ATT": ["att.com", "att.net", "wikipedia.org"],
        "GitHub": ["github.com", "github.blog", "wikipedia.org"],
        "Amazon": ["amazon.com", "amazon.co.uk", "amazon.de", "wikipedia.org", "amazon.com"],
        "Google": ["google.com", "about.google", "wikipedia.org"],
        "Globex Bank": [
            "globex-reviews.net",
            "wikipedia.org",
            "bloomberg.com",
            "linkedin.com",
            "facebook.com",
            "crunchbase.com",
            "globexbank.com",
            "trustpilot.com",
            "glassdoor.com",
            "reuters.com",
        ],
        "Wikipedia": ["wikipedia.org", "wikimedia.org", "wiktionary.org"],
        "Emburse": ["emburse.com", "chromeriver.com", "certify.com", "abacus.com"],
        "Microsoft": ["microsoft.com", "msn.com", "live.com"],
        "Apple": ["apple.com", "icloud.com", "wikipedia.org"],
        "Facebook": ["facebook.com", "fb.com", "wikipedia.org"],
        "Bank of America": ["bankofamerica.com", "bofa.com", "wikipedia.org"],
        "Instagram": ["instagram.com", "about.instagram.com", "wikipedia.org"],
        "Bitkub": ["bitkub.com", "coinmarketcap.com", "wikipedia.org"],
    }
    for brand, domains in brand_results.items():
        results = domains_to_results(domains)
        record("web_search", brand, results)          # agent query
        record("web_search", f'"{brand}"', results)   # domain-checker query

    # image search used by the b03 scenario
    thumbs = [
        ("https://thumbs.example-imgcdn.net/att1.png", att_logo),
        ("https://thumbs.example-imgcdn.net/att2.png", att_alt),
        ("https://thumbs.example-imgcdn.net/att3.png", None),  # dead link
    ]
    record(
        "image_search",
        "AT&T logo",
        [
            {
                "thumbnail_link": url,
                "source_link": f"https://www.att.com/img/{i}",
                "title": "AT&T logo",
                "snippet": "AT&T corporate logo.",
                "context_link": "https://www.att.com/",
                "rank": i + 1,
            }
            for i, (url, _) in enumerate(thumbs)
        ],
    )
    for url, data in thumbs:
        record("fetch", url, {"blob": store_blob(data) if data else None})

    record("detect_logo", fnv1a64(att_logo), {"brand_guess": "AT&T", "confidence": 0.9})
    record(
        "describe",
        f"{fnv1a64(att_shot)}+{fnv1a64(att_logo)}",
        {"text": "Login page showing the AT&T globe logo and an AT&T sign-in form."},
    )
    record("describe", f"{fnv1a64(blank_shot)}+-", {"text": ""})

    # --- samples --------------------------------------------------------
    def login_html(brand, extra=""):
        return (
            f"<html><head><title>{brand} - Sign In</title></head><body>"
            f"<h1>Welcome to {brand}</h1>{extra}"
            f'<form><input type="text" name="username" placeholder="Email or username">'
            f'<input type="password" name="password" placeholder="Password">'
            f"<button>Sign in</button></form>"
            f"<p>Forgot your password? Contact {brand} support.</p>"
            f"</body></html>"
        )

    one_search = lambda brand, reason: [
        tool_step("get_google_search_results", brand),
        final_step(brand, reason),
    ]

    samples = [
        # id, url, html, label, true_brands, scenario, images
        ("b01", "https://www.nike.com/", login_html("Nike"), "benign", ["Nike"],
         one_search("Nike", "Search results match the Nike branding on the page."), None),
        ("b02", "https://www.paypal.com/signin", login_html("PayPal"), "benign", ["PayPal"],
         one_search("PayPal", "Page text and search results point to PayPal."), None),
        ("b03", "https://www.att.com/my/", login_html("AT&T"), "benign", ["AT&T"],
         [tool_step("get_google_search_results", "AT&T"),
          tool_step("get_google_img_search_res", "AT&T logo"),
          final_step("AT&T", "Logo detector, vision output and an identical image-search "
                             "thumbnail all indicate AT&T.")],
         {"logo.png": att_logo, "shot.png": att_shot}),
        ("b04", "https://github.com/login", login_html("GitHub"), "benign", ["GitHub"],
         one_search("GitHub", "Sign-in page matches GitHub."), None),
        ("b05", "https://www.amazon.com/ap/signin", login_html("Amazon"), "benign", ["Amazon"],
         one_search("Amazon", "Checkout form and search results match Amazon."), None),
        ("b06", "https://accounts.google.com/signin", login_html("Google"), "benign", ["Google"],
         one_search("Google", "Account chooser page for Google."), None),
        ("b07", "https://www.globexbank.com/retail", login_html("Globex Bank"), "benign",
         ["Globex Bank"],
         one_search("Globex Bank", "Page presents itself as Globex Bank online banking."), None),
        ("b08", "https://www.example-blank.net/", "", "benign", [],
         [final_step("no brand name",
                     "The page is empty; no text, logo or title identifies any brand.")], None),
        ("b09", "https://en.wikipedia.org/wiki/Main_Page", login_html("Wikipedia"), "benign",
         ["Wikipedia"],
         [{"kind": "final", "text": "The brand is Wikipedia, obviously."},
          final_step("Wikipedia", "Title and content are the Wikipedia main page.")], None),
        ("b10", "https://chromedriver.storage-cdn-files.net/downloads", login_html("Emburse"),
         "benign", ["Emburse"],
         one_search("Emburse", "The page references Emburse Chromedriver tooling."), None),
        ("p01", "https://paypa1-secure-login.xyz/verify", login_html("PayPal"), "phish",
         ["PayPal"],
         one_search("PayPal", "Form and text imitate the PayPal sign-in page."), None),
        ("p02", "http://att-verify.account-helper.top/login", login_html("AT&T"), "phish",
         ["AT&T"],
         one_search("ATT", "The page copies ATT branding and asks for credentials."), None),
        ("p03", "https://nike-outlet-sale.shop/checkout", login_html("Nike"), "phish", ["Nike"],
         one_search("Nike", "Storefront uses Nike branding and product imagery."), None),
        ("p04", "https://login.micros0ft-online.icu/common", login_html("Microsoft"), "phish",
         ["Microsoft"],
         one_search("Microsoft", "Sign-in form mimics the Microsoft account portal."), None),
        ("p05", "https://appleid-unlock.xyz/account", login_html("Apple"), "phish", ["Apple"],
         [tool_step("get_google_search_results", "Apple"),
          {"kind": "final",
           "text": "```json\n" + json.dumps({
               "brand_name": "Apple",
               "reason": "The page imitates the Apple ID unlock flow."}) + "\n```"}], None),
        ("p06", "https://fb-security-check.online/confirm", login_html("Facebook"), "phish",
         ["Facebook"],
         one_search("Facebook", "Security-check page copies Facebook branding."), None),
        ("p07", "https://secure-bankofamerica.verify-id.net/auth", login_html("Bank of America"),
         "phish", ["BofA", "Bank of America"],
         one_search("Bank of America", "The page imitates Bank of America online banking."),
         None),
        ("p08", "https://instagram-verify.top/challenge", login_html("Instagram"), "phish",
         ["Instagram"],
         one_search("Instagram", "Login challenge page copies Instagram."), None),
        ("p09", "https://bitkub-login.site/wallet", login_html("Bitkub"), "phish", ["Bitkub"],
         one_search("Bitkub", "Wallet login page imitates the Bitkub exchange."), None),
        ("p10", "https://update-account-info.icu/start",
         "<html><body>Please complete the verification to continue.</body></html>", "phish", [],
         [final_step("no brand found",
                     "The page shows only a generic verification message and a blank "
                     "screenshot; nothing identifies a brand.")],
         {"shot.png": blank_shot}),
    ]

    labels = []
    for sid, url, html, label, brands, scenario, images in samples:
        d = os.path.join(corpus, sid)
        os.makedirs(d)
        with open(os.path.join(d, "info.txt"), "w") as f:
            f.write(url + "\n")
        with open(os.path.join(d, "html.txt"), "w") as f:
            f.write(html)
        for name, data in (images or {}).items():
            with open(os.path.join(d, name), "wb") as f:
                f.write(data)
        entry = {"id": sid, "label": label}
        if brands:
            entry["true_brand"] = brands
        labels.append(entry)
        with open(os.path.join(scenarios, sid + ".json"), "w") as f:
            json.dump(scenario, f, indent=1)
            f.write("\n")

    with open(os.path.join(corpus, "labels.jsonl"), "w") as f:
        for entry in labels:
            f.write(json.dumps(entry) + "\n")

    with open(os.path.join(cassettes, "suite.jsonl"), "w") as f:
        for entry in cassette_entries:
            f.write(json.dumps(entry) + "\n")

    print(f"wrote {len(samples)} samples, {len(cassette_entries)} cassette entries")


if __name__ == "__main__":
    main()
