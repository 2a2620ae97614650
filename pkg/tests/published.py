"""Published reference curves for m=2, kept verbatim."""

BINARY_CURVES = {
    10: [
        (0, 0), (0.05, 0.0), (0.1, 0.000146903), (0.2, 0.00636938), (0.3, 0.047349), (0.4, 0.166239),
        (0.5, 0.376953), (0.6, 0.633103), (0.7, 0.849732), (0.8, 0.967207), (0.9, 0.998365),
        (0.95, 0.999936), (1, 1),
    ],
    50: [
        (0.05, 0.0), (0.1, 0.0), (0.2, 4.9241e-7), (0.3, 0.000933179), (0.4, 0.0573438), (0.5, 0.443862),
        (0.6, 0.902193), (0.7, 0.99763), (0.8, 0.999998), (0.9, 1.0), (0.95, 1.0), (1, 1),
    ],
    100: [
        (0, 0), (0.05, 0.0), (0.1, 0.0), (0.2, 5.17989e-12), (0.3, 9.03469e-6), (0.4, 0.0167617),
        (0.5, 0.460205), (0.6, 0.972901), (0.7, 0.999978), (0.8, 1.0), (0.9, 1.0), (0.95, 1.0), (1, 1),
    ],
}

# identification-rate reconstruction at n=10
PID_N10 = [
    (0.0, 0.0), (0.05, 5.37960058398467e-10), (0.1, 7.088606331722193e-07),
    (0.15000000000000002, 3.86327482081078e-05), (0.2, 0.0005634136976601906),
    (0.25, 0.003942141664083465), (0.30000000000000004, 0.017144816431258456),
    (0.35000000000000003, 0.05316661436294621), (0.4, 0.12752124614721674),
    (0.45, 0.24928935982841194), (0.5, 0.41190147399902344), (0.55, 0.5913611846716277),
    (0.6000000000000001, 0.7553372033163934), (0.65, 0.878219413622599),
    (0.7000000000000001, 0.9520381026686567), (0.75, 0.9861355830562388), (0.8, 0.997405172599326),
    (0.8500000000000001, 0.9997516180103759), (0.9, 0.9999928490959789),
    (0.9500000000000001, 0.9999999886592819), (1.0, 1.0),
]

# second curve of the same plot: coincides with the strict binary tail at n=100
PID_CURVE_SECOND = [
    (0.0, 0.0), (0.05, 3.7430554296596106e-39), (0.1, 6.323256842131429e-25),
    (0.15000000000000002, 3.942440434927658e-17), (0.2, 5.179892637524884e-12),
    (0.25, 2.131191608390269e-08), (0.30000000000000004, 9.03468619572068e-06),
    (0.35000000000000003, 0.0007378332488626113), (0.4, 0.016761686503161403),
    (0.45, 0.13457621318805263), (0.5, 0.46020538130641064), (0.55, 0.8172718153138552),
    (0.6000000000000001, 0.9729008022429914), (0.65, 0.9985494385234414),
    (0.7000000000000001, 0.9999779390866731), (0.75, 0.9999999336149751),
    (0.8, 0.9999999999786072), (0.8500000000000001, 0.9999999999999999), (0.9, 1.0),
    (0.9500000000000001, 0.9999999999999999), (1.0, 1.0),
]

# third curve of the same plot: coincides with the identification rate at n=100
PID_CURVE_THIRD = [
    (0.0, 0.0), (0.05, 2.3222802751611695e-75), (0.1, 2.964852156817343e-47),
    (0.15000000000000002, 6.783947104813922e-32), (0.2, 7.626779260241388e-22),
    (0.25, 8.778706966466265e-15), (0.30000000000000004, 1.0864028884363591e-09),
    (0.35000000000000003, 4.940555931357384e-06), (0.4, 0.0016847865199193523),
    (0.45, 0.06807524986274897), (0.5, 0.4718257604953717), (0.55, 0.9112993844383077),
    (0.6000000000000001, 0.9973645966438089), (0.65, 0.9999905406616545),
    (0.7000000000000001, 0.9999999974041742), (0.75, 0.9999999999999729),
    (0.8, 0.9999999999999997), (0.8500000000000001, 0.9999999999999998), (0.9, 1.0),
    (0.9500000000000001, 0.9999999999999999), (1.0, 1.0),
]
