const margin = { top: 20, right: 20, bottom: 30, left: 50 };
const rows = data.filter(d => d.Volume !== null).map(d => ({ date: new Date(d.Date), volume: d.Volume }));
const xScale = d3.scaleTime().domain(d3.extent(rows, d => d.date)).range([margin.left, vw - margin.right]);
const yScale = d3.scaleLinear().domain([0, d3.max(rows, d => d.volume)]).nice().range([vh - margin.bottom, margin.top]);
const area = d3.area().curve(d3.curveMonotoneX).x(d => xScale(d.date)).y0(yScale(0)).y1(d => yScale(d.volume));

svg.append("path").datum(rows).attr("fill", "#c6dbef").attr("d", area);
svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale).ticks(vw / 80));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale).tickFormat(d3.format("~s")));
return { xScale, yScale };
